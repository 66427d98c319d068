// Session flow: fetch the plan, present items in order, submit answers, and
// surface verdicts, scores, badges, and social cues. All judging is remote;
// on network failure the current item stays put for a retry.

import { ApiClient, ApiError, type AnswerReply, type ChallengeView, type SessionView } from "./api.js";
import {
  renderBadges,
  renderCues,
  renderImages,
  renderOptions,
  renderScore,
  renderSocialCue,
  renderTileKeyboard,
} from "./render.js";

export type SessionElements = {
  images: HTMLElement;
  input: HTMLElement;
  feedback: HTMLElement;
  score: HTMLElement;
  badges: HTMLElement;
  cue: HTMLElement;
  hintButton: HTMLButtonElement;
};

export class SessionController {
  session: SessionView | null = null;
  index = 0;
  done = false;
  lastReply: AnswerReply | null = null;

  constructor(
    private client: ApiClient,
    private playerId: string,
    private ui: SessionElements,
  ) {
    this.ui.hintButton.addEventListener("click", () => void this.buyHint());
  }

  current(): ChallengeView | null {
    if (!this.session || this.index >= this.session.items.length) return null;
    return this.session.items[this.index];
  }

  async load(): Promise<void> {
    this.session = await this.client.session(this.playerId);
    this.index = 0;
    this.done = false;
    this.renderCurrent();
  }

  renderCurrent(): void {
    const item = this.current();
    if (!item) {
      this.done = true;
      this.ui.input.replaceChildren();
      this.ui.images.replaceChildren();
      this.ui.feedback.textContent = "Session complete!";
      return;
    }
    renderImages(this.ui.images, item.image_refs);
    this.ui.feedback.textContent = "";
    if (item.options) {
      renderOptions(this.ui.input, item.options, (option) => void this.submit(option));
    } else {
      renderTileKeyboard(this.ui.input, item, (word) => void this.submit(word));
    }
  }

  async submit(submission: string): Promise<AnswerReply | null> {
    const item = this.current();
    if (!item) return null;
    let reply: AnswerReply;
    try {
      reply = await this.client.answer(this.playerId, item.challenge_id, submission);
    } catch (error) {
      this.ui.feedback.textContent =
        error instanceof ApiError ? error.detail : "Network trouble; try again.";
      return null; // stay on the same item, never judge locally
    }
    this.lastReply = reply;
    this.ui.feedback.textContent = reply.correct
      ? "Correct!"
      : reply.unspellable
        ? "That word cannot be built from these tiles."
        : "Not quite.";
    renderScore(this.ui.score, reply.score.delta, reply.score.balance_after);
    renderBadges(this.ui.badges, reply.new_badges);
    renderSocialCue(this.ui.cue, reply.social_cue);
    this.index += 1;
    this.renderCurrent();
    return reply;
  }

  async buyHint(): Promise<void> {
    const item = this.current();
    if (!item) return;
    try {
      const hint = await this.client.buyHint(this.playerId, item.challenge_id);
      renderCues(this.ui.images, hint.cues);
      renderScore(this.ui.score, -hint.cost, hint.balance_after);
    } catch (error) {
      if (error instanceof ApiError && error.status === 402) {
        this.ui.feedback.textContent = `Not enough points for a hint: ${error.detail}`;
      } else if (error instanceof ApiError) {
        this.ui.feedback.textContent = error.detail;
      } else {
        this.ui.feedback.textContent = "Network trouble; try again.";
      }
    }
  }
}
