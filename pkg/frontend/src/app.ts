// Studio shell: wires the wizard, live dashboard (map + timeline), interview
// panel, and results view to the service. All state shown anywhere derives
// from server messages; this file only routes them.

import { ApiError, StudioApi, subscribeSse } from "./api.js";
import { InterviewPanel, renderHistory } from "./interview.js";
import { buildMarkers, decodeTiles, drawMap, interpolateMarkers, Marker, MapStatics } from "./mapView.js";
import { applyRecord, fromSnapshot, WorldState } from "./replay.js";
import { renderResults } from "./results.js";
import { cardsFromItems, renderCards, TimelineCard } from "./timeline.js";
import type { RecordDoc, SnapshotDoc, StreamItem } from "./types.js";
import { buildScenarioDocument, defaultInputs, missingFields, renderDiagnostics } from "./wizard.js";

const CELL_PX = 16;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class Studio {
  private api = new StudioApi(
    (document.body.dataset.serviceBase ?? `${location.protocol}//${location.hostname}:8642`),
  );
  private sid: string | null = null;
  private statics: MapStatics | null = null;
  private world: WorldState | null = null;
  private markers: Marker[] = [];
  private previousMarkers: Marker[] = [];
  private markerTween = 1;
  private cards: TimelineCard[] = [];
  private items: StreamItem[] = [];
  private interviewPanel: InterviewPanel | null = null;
  private unsubscribe: (() => void) | null = null;

  constructor() {
    el<HTMLButtonElement>("create-btn").onclick = () => void this.createSession();
    el<HTMLButtonElement>("start-btn").onclick = () => void this.start();
    el<HTMLButtonElement>("pause-btn").onclick = () => void this.pauseResume();
    el<HTMLButtonElement>("abort-btn").onclick = () => void this.abort();
    el<HTMLButtonElement>("ask-btn").onclick = () => void this.ask();
    setInterval(() => void this.refreshInfo(), 500);
    requestAnimationFrame(() => this.animate());
  }

  private wizardInputs() {
    const inputs = defaultInputs();
    inputs.id = el<HTMLInputElement>("w-id").value || inputs.id;
    inputs.title = el<HTMLInputElement>("w-title").value || inputs.title;
    inputs.description = el<HTMLTextAreaElement>("w-desc").value;
    inputs.seed = Number(el<HTMLInputElement>("w-seed").value);
    inputs.maxSteps = Number(el<HTMLInputElement>("w-steps").value);
    inputs.width = Number(el<HTMLInputElement>("w-width").value);
    inputs.height = Number(el<HTMLInputElement>("w-height").value);
    inputs.numRegions = Number(el<HTMLInputElement>("w-regions").value);
    inputs.regionNames = el<HTMLInputElement>("w-region-names")
      .value.split(",").map((s) => s.trim()).filter(Boolean);
    inputs.members = el<HTMLTextAreaElement>("w-members")
      .value.split("\n").map((s) => s.trim()).filter(Boolean)
      .map((line) => {
        const [name, role, trust] = line.split(",").map((s) => s.trim());
        return { name, role: role || "Searcher", trust_level: (trust as never) || "unspecified" };
      });
    inputs.entities = el<HTMLTextAreaElement>("w-entities")
      .value.split("\n").map((s) => s.trim()).filter(Boolean)
      .map((line) => {
        const [name, kind, region, flag] = line.split(",").map((s) => s.trim());
        return { name, kind: kind || "victim", region: region || undefined, critical: flag === "critical" };
      });
    inputs.goalStatement = el<HTMLInputElement>("w-goal").value || inputs.goalStatement;
    inputs.goalRegion = el<HTMLInputElement>("w-goal-region").value || inputs.goalRegion;
    return inputs;
  }

  private async createSession(): Promise<void> {
    const inputs = this.wizardInputs();
    const missing = missingFields(inputs);
    const box = el("wizard-diagnostics");
    if (missing.length) {
      box.innerHTML = renderDiagnostics(
        missing.map((field) => ({ severity: "error", path: field, message: `${field} is required` })),
      );
      return;
    }
    try {
      const created = await this.api.createSession(buildScenarioDocument(inputs));
      this.sid = created.session;
      box.innerHTML = renderDiagnostics(created.diagnostics);
      el("session-label").textContent = `session ${created.session}`;
      this.interviewPanel = new InterviewPanel(this.api, created.session);
      const info = await this.api.info(created.session);
      el<HTMLSelectElement>("ask-agent").innerHTML = info.members
        .map((m) => `<option>${m.name}</option>`)
        .join("");
    } catch (error) {
      if (error instanceof ApiError) {
        box.innerHTML = renderDiagnostics(error.diagnostics.length
          ? error.diagnostics
          : [{ severity: "error", path: "", message: error.message }]);
      } else throw error;
    }
  }

  private pacing(): number | null {
    const value = Number(el<HTMLInputElement>("pacing").value);
    return value >= 200 ? null : value; // slider maxed out = unthrottled
  }

  private async start(): Promise<void> {
    if (!this.sid) return;
    await this.api.start(this.sid, this.pacing());
    this.subscribe();
  }

  private subscribe(): void {
    if (!this.sid) return;
    this.unsubscribe?.();
    this.unsubscribe = subscribeSse(this.api.base, this.sid, null, (item) => this.onItem(item), () => {
      void this.showResults();
    });
  }

  private onItem(item: StreamItem): void {
    this.items.push(item);
    if (item.type === "snapshot") {
      const doc = item.payload as SnapshotDoc;
      if (!this.statics) this.statics = decodeTiles(doc);
      this.world = fromSnapshot(doc);
    } else if (item.type === "record" && this.world) {
      applyRecord(this.world, item.payload as RecordDoc);
    } else if (item.type === "gap") {
      // incremental state is stale; resubscribe from a fresh snapshot
      this.subscribe();
    }
    if (this.world) {
      this.previousMarkers = this.markers;
      this.markers = buildMarkers(this.world);
      this.markerTween = 0;
    }
    this.cards = cardsFromItems(this.items);
    el("timeline").innerHTML = renderCards(this.cards);
    el("clock-label").textContent = this.world ? `t=${this.world.clock}` : "";
  }

  private animate(): void {
    if (this.statics && this.world) {
      const canvas = el<HTMLCanvasElement>("map");
      const ctx = canvas.getContext("2d");
      if (ctx) {
        this.markerTween = Math.min(this.markerTween + 0.2, 1);
        const markers = interpolateMarkers(this.previousMarkers, this.markers, this.markerTween);
        drawMap(ctx, this.statics, markers, CELL_PX);
      }
    }
    requestAnimationFrame(() => this.animate());
  }

  private async refreshInfo(): Promise<void> {
    if (!this.sid) return;
    const info = await this.api.info(this.sid);
    el("state-label").textContent = info.state + (info.outcome ? ` (${info.outcome})` : "");
    const pauseBtn = el<HTMLButtonElement>("pause-btn");
    pauseBtn.textContent = info.state === "paused" ? "Resume" : "Pause";
    pauseBtn.disabled = info.state !== "running" && info.state !== "paused";
    el<HTMLButtonElement>("ask-btn").disabled = !(info.state === "paused" || info.state === "finished");
    if (info.state === "finished") void this.showResults();
  }

  private async pauseResume(): Promise<void> {
    if (!this.sid) return;
    const info = await this.api.info(this.sid);
    if (info.state === "running") await this.api.pause(this.sid);
    else if (info.state === "paused") await this.api.resume(this.sid);
  }

  private async abort(): Promise<void> {
    if (this.sid) await this.api.abort(this.sid);
  }

  private async ask(): Promise<void> {
    if (!this.sid || !this.interviewPanel) return;
    const agent = el<HTMLSelectElement>("ask-agent").value;
    const question = el<HTMLInputElement>("ask-question").value;
    if (!question.trim()) return;
    await this.interviewPanel.ask(agent, question);
    el("qa-history").innerHTML = renderHistory(this.interviewPanel.historyFor(agent));
  }

  private async showResults(): Promise<void> {
    if (!this.sid) return;
    try {
      const results = await this.api.results(this.sid);
      el("results").innerHTML = renderResults(results);
      const link = el<HTMLAnchorElement>("log-download");
      const text = await this.api.logText(this.sid);
      link.href = URL.createObjectURL(new Blob([text], { type: "application/json" }));
    } catch {
      // run not finished yet
    }
  }
}

document.addEventListener("DOMContentLoaded", () => new Studio());
