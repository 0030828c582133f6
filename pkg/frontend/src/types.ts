// Wire types mirroring the service API schemas. The UI never computes
// simulation logic; everything here is shaped by what the server sends.

export type Cell = [number, number];

export interface RegionDoc {
  id: number;
  name: string;
  bounds: [number, number, number, number]; // x0, y0, x1, y1 inclusive
  description: string;
}

export interface EntityDoc {
  name: string;
  kind: string;
  interactive: boolean;
  attributes: Record<string, string>;
}

export interface PlacementDoc {
  entity: string;
  cell: Cell | null;
  carried_by: string | null;
}

export interface SnapshotDoc {
  format_version: number;
  clock: number;
  grid: { width: number; height: number; rows: number[][] };
  regions: RegionDoc[];
  tree: unknown;
  adjacency: [number, number, Cell][];
  doors: [number, number, number][];
  entities: EntityDoc[];
  placements: PlacementDoc[];
  agents: { name: string; cell: Cell }[];
}

export interface RecordDoc {
  step: number;
  seq: number;
  kind: string;
  agent: string | null;
  payload: Record<string, unknown>;
  rationale: string;
}

export interface StreamItem {
  seq: number;
  type: "record" | "snapshot" | "gap";
  payload: SnapshotDoc | RecordDoc | { resume_from: number };
}

export interface Diagnostic {
  severity: string;
  path: string;
  message: string;
}

export interface SessionInfo {
  id: string;
  state: "not_started" | "running" | "paused" | "finished";
  step: number;
  scenario_id: string;
  title: string;
  members: { name: string; role: string; trust_level: string }[];
  max_steps: number;
  outcome: string | null;
  diagnostics: string[];
}

export interface InterviewAnswerDoc {
  agent: string;
  question: string;
  text: string;
  retrieved_ids: number[];
  cited_ids: number[];
}

export interface ResultsDoc {
  outcome: string;
  final_step: number;
  success_step: number | null;
  metrics: Record<string, unknown>;
  survey: { agent: string; item: string; value: number; rationale: string }[];
}
