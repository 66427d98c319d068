// Typed client for the avatarquest HTTP API. All judging happens server-side;
// this client never sees an answer or its length for open avatar rounds.

export type ChallengeKind = "standard" | "avatar_recognition" | "avatar_recall";

export type ChallengeView = {
  challenge_id: string;
  kind: ChallengeKind;
  image_refs: string[];
  letter_pool: string[] | null;
  options: string[] | null;
  answer_length: number | null;
  cues: string[] | null;
};

export type SessionView = {
  session_id: string;
  created_ms: number;
  avatar_count: number;
  recognition_fraction: number;
  items: ChallengeView[];
};

export type ScoreEventView = {
  challenge_id: string;
  kind: ChallengeKind;
  delta: number;
  balance_after: number;
  timestamp_ms: number;
};

export type BadgeView = { kind: "smiley" | "cake" | "trophy"; date: string };

export type SocialCueView = {
  trigger: string;
  text: string;
  severity: "positive" | "neutral" | "negative";
  lapse_days: number | null;
};

export type AnswerReply = {
  correct: boolean;
  unspellable: boolean;
  kind: ChallengeKind;
  score: ScoreEventView;
  new_badges: BadgeView[];
  social_cue: SocialCueView | null;
  stage: "early" | "late";
};

export type HintReply = {
  challenge_id: string;
  kind: string;
  cost: number;
  balance_after: number;
  cues: string[];
};

export type ReportView = {
  period: "day" | "week" | "month";
  solved_avatar_correct: number;
  solved_avatar_total: number;
  score: number;
  remaining_to_next_stage: number | "already_late";
  stage: "early" | "late";
  series: [string, number][];
};

export type NotificationView = {
  kind: "reminder" | "stuck_hint_offer";
  player_id: string;
  due_ms: number;
  payload: string;
  challenge_id: string | null;
  revealed_letter: string | null;
};

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  // nowOverride feeds the server's ?now= test hook; null means wall clock
  constructor(public baseUrl: string, public nowOverride: number | null = null) {}

  private url(path: string): string {
    const url = new URL(path, this.baseUrl);
    if (this.nowOverride !== null) {
      url.searchParams.set("now", String(this.nowOverride));
    }
    return url.toString();
  }

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.url(path), init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.call<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createPlayer(seed?: number, timezone = "UTC") {
    return this.post<{ player_id: string; schema_id: string; profile_id: string }>(
      "/players",
      seed === undefined ? { timezone } : { seed, timezone },
    );
  }

  session(playerId: string): Promise<SessionView> {
    return this.call<SessionView>(`/players/${playerId}/session`);
  }

  answer(playerId: string, challengeId: string, submission: string): Promise<AnswerReply> {
    return this.post<AnswerReply>(`/players/${playerId}/challenges/${challengeId}/answer`, {
      submission,
    });
  }

  buyHint(playerId: string, challengeId: string): Promise<HintReply> {
    return this.post<HintReply>(`/players/${playerId}/challenges/${challengeId}/hint`, {});
  }

  report(playerId: string, period: ReportView["period"]): Promise<ReportView> {
    return this.call<ReportView>(`/players/${playerId}/report?period=${period}`);
  }

  notifications(playerId: string): Promise<NotificationView[]> {
    return this.call<NotificationView[]>(`/players/${playerId}/notifications`);
  }

  startReset(playerId: string) {
    return this.post<{ token: string; expires_ms: number; questions: { field_id: string; question_text: string }[] }>(
      `/auth/${playerId}/reset`,
      {},
    );
  }

  submitReset(playerId: string, token: string, answers: string[]) {
    return this.post<{ outcome: "granted" | "denied" | "locked" }>(
      `/auth/${playerId}/reset/${token}`,
      { answers },
    );
  }
}
