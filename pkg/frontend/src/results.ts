// Results view: outcome line, per-agent action table, survey means as text
// bars, and a run-log download.

import type { ResultsDoc } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function surveyMeans(results: ResultsDoc): Map<string, number> {
  const totals = new Map<string, { sum: number; n: number }>();
  for (const response of results.survey) {
    const entry = totals.get(response.item) ?? { sum: 0, n: 0 };
    entry.sum += response.value;
    entry.n += 1;
    totals.set(response.item, entry);
  }
  return new Map([...totals.entries()].map(([item, { sum, n }]) => [item, sum / n]));
}

function bar(value: number, max = 10, width = 20): string {
  const filled = Math.round((value / max) * width);
  return "█".repeat(filled) + "░".repeat(width - filled);
}

export function renderResults(results: ResultsDoc): string {
  const outcomeLine =
    results.outcome === "success"
      ? `Mission accomplished at step ${results.success_step}`
      : `Run ended (${results.outcome}) at step ${results.final_step}`;
  const parts = [`<h2>${escapeHtml(outcomeLine)}</h2>`];

  const actions = results.metrics["actions_by_agent"] as Record<string, Record<string, number>> | undefined;
  if (actions) {
    const rows = Object.entries(actions)
      .map(([agent, counts]) => {
        const cells = Object.entries(counts)
          .map(([kind, count]) => `${escapeHtml(kind)}: ${count}`)
          .join(", ");
        return `<tr><td>${escapeHtml(agent)}</td><td>${cells}</td></tr>`;
      })
      .join("");
    parts.push(`<table class="actions"><tr><th>agent</th><th>actions</th></tr>${rows}</table>`);
  }

  const means = surveyMeans(results);
  if (means.size) {
    const rows = [...means.entries()]
      .map(
        ([item, mean]) =>
          `<div class="survey-row"><span class="item">${escapeHtml(item)}</span>` +
          `<span class="bar">${bar(mean)}</span><span class="value">${mean.toFixed(1)}</span></div>`,
      )
      .join("\n");
    parts.push(`<div class="survey">${rows}</div>`);
  }

  parts.push(`<a class="download" download="run-log.json" href="#" id="log-download">Download run log</a>`);
  return parts.join("\n");
}
