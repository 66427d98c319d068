// DOM rendering for game views. Order contracts matter here: the four image
// cells keep the server's order on every render, cue i lands under image i,
// and the recall view never draws blanks that would betray the answer length.

import type { BadgeView, ChallengeView, ReportView, SocialCueView } from "./api.js";
import { TileKeyboard } from "./tiles.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderImages(container: HTMLElement, imageRefs: string[]): void {
  container.replaceChildren();
  imageRefs.forEach((ref, index) => {
    const cell = el("figure", "image-cell");
    cell.dataset.index = String(index);
    cell.dataset.ref = ref;
    cell.append(el("div", "image-placeholder", ref));
    cell.append(el("figcaption", "cue-slot"));
    container.append(cell);
  });
}

export function renderCues(container: HTMLElement, cues: string[]): void {
  const cells = container.querySelectorAll<HTMLElement>(".image-cell");
  cues.forEach((cue, index) => {
    const slot = cells[index]?.querySelector<HTMLElement>(".cue-slot");
    if (slot) slot.textContent = cue;
  });
}

export function renderOptions(
  container: HTMLElement,
  options: string[],
  onPick: (option: string) => void,
): void {
  container.replaceChildren();
  const list = el("div", "option-list");
  for (const option of options) {
    const button = el("button", "option-button", option);
    button.type = "button";
    button.addEventListener("click", () => onPick(option));
    list.append(button);
  }
  container.append(list);
}

export type TileInput = {
  keyboard: TileKeyboard;
  refresh: () => void;
};

export function renderTileKeyboard(
  container: HTMLElement,
  challenge: ChallengeView,
  onSubmit: (submission: string) => void,
): TileInput {
  container.replaceChildren();
  const keyboard = new TileKeyboard(challenge.letter_pool ?? []);

  const composed = el("div", "composed-word");
  composed.dataset.role = "composed";

  // standard puzzles show the word length as blanks; avatar recall must not
  const slots =
    challenge.kind === "standard" && challenge.answer_length !== null
      ? el("div", "answer-slots", "_ ".repeat(challenge.answer_length).trim())
      : null;

  const rack = el("div", "tile-rack");
  const tileButtons: HTMLButtonElement[] = [];
  keyboard.tiles.forEach((tile, index) => {
    const button = el("button", "tile", tile.letter);
    button.type = "button";
    button.dataset.index = String(index);
    button.addEventListener("click", () => {
      if (keyboard.press(index)) refresh();
    });
    tileButtons.push(button);
    rack.append(button);
  });

  const controls = el("div", "tile-controls");
  const backspace = el("button", "backspace", "⌫");
  backspace.type = "button";
  backspace.addEventListener("click", () => {
    if (keyboard.backspace()) refresh();
  });
  const submit = el("button", "submit-word", "Submit");
  submit.type = "button";
  submit.addEventListener("click", () => onSubmit(keyboard.value()));
  controls.append(backspace, submit);

  function refresh(): void {
    composed.textContent = keyboard.value();
    tileButtons.forEach((button, index) => {
      button.disabled = keyboard.tiles[index].used;
    });
  }

  if (slots) container.append(slots);
  container.append(composed, rack, controls);
  refresh();
  return { keyboard, refresh };
}

export function renderBadges(container: HTMLElement, badges: BadgeView[]): void {
  for (const badge of badges) {
    container.append(el("span", `badge badge-${badge.kind}`, badge.kind));
    if (badge.kind === "trophy") {
      showMilestone(container.ownerDocument.body, "All daily avatar challenges solved!");
    }
  }
}

export function showMilestone(body: HTMLElement, message: string): void {
  body.querySelector(".milestone-overlay")?.remove();
  const overlay = el("div", "milestone-overlay trophy");
  overlay.append(el("div", "milestone-art", "\u{1F3C6}"));
  overlay.append(el("p", "milestone-text", message));
  const dismiss = el("button", "milestone-dismiss", "Continue");
  dismiss.type = "button";
  dismiss.addEventListener("click", () => overlay.remove());
  overlay.append(dismiss);
  body.append(overlay);
}

export function renderSocialCue(container: HTMLElement, cue: SocialCueView | null): void {
  container.replaceChildren();
  if (!cue) return;
  container.append(el("p", `social-cue severity-${cue.severity}`, cue.text));
}

export function renderScore(container: HTMLElement, delta: number, balance: number): void {
  container.replaceChildren();
  const sign = delta >= 0 ? "+" : "";
  container.append(el("span", "score-delta", `${sign}${delta}`));
  container.append(el("span", "score-balance", `${balance} pts`));
}

// Dashboard: totals are passed straight through from the report, never
// recomputed on the client.
export function renderDashboard(container: HTMLElement, report: ReportView): void {
  container.replaceChildren();
  const totals = el("div", "report-totals");
  const solved = el("span", "report-solved");
  solved.dataset.value = String(report.solved_avatar_correct);
  solved.textContent = `${report.solved_avatar_correct} / ${report.solved_avatar_total} avatar challenges solved`;
  const score = el("span", "report-score");
  score.dataset.value = String(report.score);
  score.textContent = `${report.score} pts`;
  totals.append(solved, score);

  const stage = el("div", "stage-progress");
  stage.textContent =
    report.remaining_to_next_stage === "already_late"
      ? "Late stage reached"
      : `${report.remaining_to_next_stage} more days of play to the next stage`;

  const maxCount = Math.max(1, ...report.series.map(([, count]) => count));
  const chart = el("div", "report-chart");
  for (const [bucket, count] of report.series) {
    const bar = el("div", "report-bar");
    bar.dataset.bucket = bucket;
    bar.dataset.count = String(count);
    bar.style.height = `${Math.round((count / maxCount) * 100)}%`;
    bar.title = `${bucket}: ${count}`;
    chart.append(bar);
  }

  container.append(totals, stage, chart);
}
