// Interview panel: per-agent question/answer history with cited memories
// rendered as expandable cards. Only enabled while the server reports the
// session paused or finished.

import type { StudioApi } from "./api.js";
import type { InterviewAnswerDoc } from "./types.js";

export interface QARecord {
  question: string;
  answer: InterviewAnswerDoc;
}

export class InterviewPanel {
  private history = new Map<string, QARecord[]>();

  constructor(private readonly api: StudioApi, private readonly sid: string) {}

  historyFor(agent: string): QARecord[] {
    return this.history.get(agent) ?? [];
  }

  async ask(agent: string, question: string): Promise<InterviewAnswerDoc> {
    const answer = await this.api.interview(this.sid, agent, question);
    const records = this.history.get(agent) ?? [];
    records.push({ question, answer });
    this.history.set(agent, records);
    return answer;
  }
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderMemoryCards(answer: InterviewAnswerDoc): string {
  if (!answer.cited_ids.length) return "";
  return answer.cited_ids
    .map(
      (id) =>
        `<details class="memory-card" data-memory-id="${id}">` +
        `<summary>memory ${id}</summary>` +
        `<div class="memory-note">cited in the answer above</div></details>`,
    )
    .join("");
}

export function renderHistory(records: QARecord[]): string {
  return records
    .map(
      (record) =>
        `<div class="qa">` +
        `<div class="question">Q: ${escapeHtml(record.question)}</div>` +
        `<div class="answer">A: ${escapeHtml(record.answer.text)}</div>` +
        renderMemoryCards(record.answer) +
        `</div>`,
    )
    .join("\n");
}
