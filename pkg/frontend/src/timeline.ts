// Event timeline: one card per engine record, ordered by (step, seq),
// with gap markers where the stream dropped items.

import type { RecordDoc, StreamItem } from "./types.js";

export interface TimelineCard {
  step: number;
  seq: number;
  agent: string;
  kind: string;
  summary: string;
  rationale: string;
  gap?: boolean;
}

const SHOWN_KINDS = new Set([
  "decision",
  "resolved",
  "rejected",
  "message",
  "invitation",
  "conversation_closed",
  "policy_failure",
  "success",
  "ended",
]);

function summarize(record: RecordDoc): string {
  const p = record.payload;
  switch (record.kind) {
    case "decision":
      return p.variant === "communicate"
        ? `opens a conversation with ${(p.targets as string[]).join(", ")}`
        : `decides: ${String(p.description ?? "")}`;
    case "resolved":
      return p.failed
        ? `failed: ${String(p.description)} (${String(p.failed)})`
        : `completed: ${String(p.description)}`;
    case "rejected":
      return `proposal rejected: ${String(p.reason)}`;
    case "message":
      return `says: ${String(p.text)}`;
    case "invitation":
      return `invitation from ${String(p.from)}: ${String(p.response)}`;
    case "conversation_closed":
      return `conversation closed (${String(p.reason)}, ${String(p.turns)} turns)`;
    case "policy_failure":
      return `policy failure: ${String(p.error)}`;
    case "success":
      return "goal reached";
    case "ended":
      return `run ended: ${String(p.outcome)} at step ${String(p.step)}`;
    default:
      return record.kind;
  }
}

export function cardsFromItems(items: StreamItem[]): TimelineCard[] {
  const cards: TimelineCard[] = [];
  for (const item of items) {
    if (item.type === "gap") {
      const payload = item.payload as { resume_from: number };
      cards.push({
        step: -1,
        seq: item.seq,
        agent: "",
        kind: "gap",
        summary: `stream gap: events before seq ${payload.resume_from} were dropped`,
        rationale: "",
        gap: true,
      });
      continue;
    }
    if (item.type !== "record") continue;
    const record = item.payload as RecordDoc;
    if (!SHOWN_KINDS.has(record.kind)) continue;
    cards.push({
      step: record.step,
      seq: record.seq,
      agent: record.agent ?? "",
      kind: record.kind,
      summary: summarize(record),
      rationale: record.rationale,
    });
  }
  return cards.sort((a, b) => (a.step - b.step) || (a.seq - b.seq));
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderCards(cards: TimelineCard[], limit = 400): string {
  const shown = cards.slice(-limit);
  return shown
    .map((card) => {
      if (card.gap) {
        return `<div class="card gap">⚠ ${escapeHtml(card.summary)}</div>`;
      }
      const rationale = card.rationale
        ? `<div class="rationale">${escapeHtml(card.rationale)}</div>`
        : "";
      return (
        `<div class="card kind-${card.kind}">` +
        `<span class="step">t=${card.step}</span> ` +
        `<span class="agent">${escapeHtml(card.agent)}</span> ` +
        `<span class="summary">${escapeHtml(card.summary)}</span>${rationale}</div>`
      );
    })
    .join("\n");
}
