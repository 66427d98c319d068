// Answer lookups for the scripted tests. The client under test never sees
// answers; the test regenerates the deterministic profile through the game's
// own CLI and reads the standard bank straight from the repository data.

import { execFileSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import type { ChallengeView } from "../src/api.js";

export const PROFILE_SEED = 42;

// vitest runs with cwd = frontend/; the bank data lives in the game package
const repoRoot = join(process.cwd(), "..");

export type AnswerBook = Map<string, string>;

export type BankEntryData = {
  entry_id: string;
  answer: string;
  image_refs: string[];
  verbal_cues: string[];
};

export function loadBankEntries(): Map<string, BankEntryData> {
  const bankPath = join(repoRoot, "src", "avatarquest", "data", "challenge_bank.json");
  const bank = JSON.parse(readFileSync(bankPath, "utf-8")) as { entries: BankEntryData[] };
  return new Map(bank.entries.map((entry) => [entry.entry_id, entry]));
}

export function loadAnswerBook(): AnswerBook {
  const book: AnswerBook = new Map();

  const generated = JSON.parse(
    execFileSync("python3", ["-m", "avatarquest.cli", "gen-avatar", "--seed", String(PROFILE_SEED)], {
      encoding: "utf-8",
    }),
  ) as { assignments: Record<string, string> };
  for (const [fieldId, answer] of Object.entries(generated.assignments)) {
    book.set(`field:${fieldId}`, answer);
  }

  for (const entry of loadBankEntries().values()) {
    book.set(`entry:${entry.entry_id}`, entry.answer);
  }
  return book;
}

export function answerFor(book: AnswerBook, item: ChallengeView): string {
  const [prefix, id] = item.challenge_id.split(":");
  const key = prefix === "av" ? `field:${id}` : `entry:${id}`;
  const answer = book.get(key);
  if (!answer) throw new Error(`no known answer for ${item.challenge_id}`);
  return answer;
}

export function lettersOf(text: string): string[] {
  return [...text.toUpperCase()].filter((c) => c >= "A" && c <= "Z");
}
