// App bootstrap: one player id in localStorage, everything else server-side.

import { ApiClient, type ReportView } from "./api.js";
import { renderDashboard } from "./render.js";
import { SessionController, type SessionElements } from "./session.js";

const PLAYER_KEY = "avatarquest.player_id";

function need<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function ensurePlayer(client: ApiClient): Promise<string> {
  const existing = localStorage.getItem(PLAYER_KEY);
  if (existing) return existing;
  const created = await client.createPlayer();
  localStorage.setItem(PLAYER_KEY, created.player_id);
  return created.player_id;
}

async function showDashboard(client: ApiClient, playerId: string, period: ReportView["period"]) {
  const report = await client.report(playerId, period);
  renderDashboard(need("dashboard"), report);
}

async function pollNotifications(client: ApiClient, playerId: string) {
  const list = need("notifications");
  const notes = await client.notifications(playerId);
  list.replaceChildren();
  for (const note of notes) {
    const item = document.createElement("li");
    item.className = `notification ${note.kind}`;
    item.textContent =
      note.kind === "reminder"
        ? "Your avatar misses you; play a round today!"
        : `Stuck? The answer starts with "${note.revealed_letter ?? "?"}".`;
    list.append(item);
  }
}

async function start(): Promise<void> {
  const client = new ApiClient(window.location.origin);
  const playerId = await ensurePlayer(client);

  const ui: SessionElements = {
    images: need("images"),
    input: need("input"),
    feedback: need("feedback"),
    score: need("score"),
    badges: need("badges"),
    cue: need("social-cue"),
    hintButton: need<HTMLButtonElement>("hint-button"),
  };
  const controller = new SessionController(client, playerId, ui);

  need("play-button").addEventListener("click", () => void controller.load());
  for (const period of ["day", "week", "month"] as const) {
    need(`report-${period}`).addEventListener("click", () =>
      void showDashboard(client, playerId, period),
    );
  }

  await showDashboard(client, playerId, "day");
  await pollNotifications(client, playerId);
  setInterval(() => void pollNotifications(client, playerId), 60_000);
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", () => void start());
} else {
  void start();
}
