// Client-side world reconstruction: a snapshot plus the delta records that
// follow it reproduce the server's state. The map renders exclusively from
// this module's output, so the invariant "rendered state after applying
// deltas 1..n equals the server snapshot at step n" is checked directly in
// tests against recorded sessions.

import type { Cell, RecordDoc, SnapshotDoc, StreamItem } from "./types.js";

export interface WorldState {
  clock: number;
  agents: Map<string, Cell>;
  placements: Map<string, { cell: Cell | null; carriedBy: string | null }>;
  attributes: Map<string, Record<string, string>>;
  kinds: Map<string, string>;
}

export function fromSnapshot(doc: SnapshotDoc): WorldState {
  const state: WorldState = {
    clock: doc.clock,
    agents: new Map(),
    placements: new Map(),
    attributes: new Map(),
    kinds: new Map(),
  };
  for (const agent of doc.agents) state.agents.set(agent.name, [...agent.cell]);
  for (const placement of doc.placements) {
    state.placements.set(placement.entity, {
      cell: placement.cell ? [...placement.cell] : null,
      carriedBy: placement.carried_by,
    });
  }
  for (const entity of doc.entities) {
    state.attributes.set(entity.name, { ...entity.attributes });
    state.kinds.set(entity.name, entity.kind);
  }
  return state;
}

export function applyDelta(state: WorldState, delta: Record<string, unknown>): void {
  switch (delta.change) {
    case "agent_moved":
      state.agents.set(delta.agent as string, [...(delta.to as Cell)]);
      break;
    case "entity_carried":
      state.placements.set(delta.entity as string, { cell: null, carriedBy: delta.by as string });
      break;
    case "entity_placed":
      state.placements.set(delta.entity as string, {
        cell: [...(delta.cell as Cell)],
        carriedBy: null,
      });
      break;
    case "entity_removed":
      // Removal clears presence only; the entity's declaration (kind,
      // attributes) stays, matching the server's snapshot schema.
      state.placements.delete(delta.entity as string);
      break;
    case "entity_attribute": {
      const attrs = state.attributes.get(delta.entity as string) ?? {};
      attrs[delta.key as string] = delta.value as string;
      state.attributes.set(delta.entity as string, attrs);
      break;
    }
    default:
      throw new Error(`unknown delta ${String(delta.change)}`);
  }
}

export function applyRecord(state: WorldState, record: RecordDoc): void {
  if (record.kind === "delta") {
    applyDelta(state, record.payload);
  }
  if (record.kind === "ended") {
    state.clock = (record.payload.step as number) ?? record.step;
  }
  if (record.step > state.clock) state.clock = record.step;
}

/** Differences between a replayed state and a server snapshot; empty = match.
 * The clock is taken from the snapshot (quiet ticks emit no records). */
export function diffAgainstSnapshot(state: WorldState, doc: SnapshotDoc): string[] {
  const problems: string[] = [];
  const snapAgents = new Map(doc.agents.map((a) => [a.name, a.cell]));
  if (snapAgents.size !== state.agents.size) problems.push("agent count differs");
  for (const [name, cell] of snapAgents) {
    const mine = state.agents.get(name);
    if (!mine || mine[0] !== cell[0] || mine[1] !== cell[1]) {
      problems.push(`agent ${name}: client ${String(mine)} vs server ${String(cell)}`);
    }
  }
  const snapPlacements = new Map(doc.placements.map((p) => [p.entity, p]));
  for (const [entity, placement] of snapPlacements) {
    const mine = state.placements.get(entity);
    if (!mine) {
      problems.push(`entity ${entity} missing on client`);
      continue;
    }
    const cellMatches =
      (mine.cell === null && placement.cell === null) ||
      (mine.cell !== null &&
        placement.cell !== null &&
        mine.cell[0] === placement.cell[0] &&
        mine.cell[1] === placement.cell[1]);
    if (!cellMatches || mine.carriedBy !== placement.carried_by) {
      problems.push(`entity ${entity}: client ${JSON.stringify(mine)} vs server ${JSON.stringify(placement)}`);
    }
  }
  for (const entity of state.placements.keys()) {
    if (!snapPlacements.has(entity)) problems.push(`entity ${entity} should be removed`);
  }
  for (const entity of doc.entities) {
    const mine = state.attributes.get(entity.name) ?? {};
    const theirs = entity.attributes;
    const keys = new Set([...Object.keys(mine), ...Object.keys(theirs)]);
    for (const key of keys) {
      if (mine[key] !== theirs[key]) {
        problems.push(`attributes of ${entity.name}.${key}: ${mine[key]} vs ${theirs[key]}`);
      }
    }
  }
  return problems;
}

export interface ReplayCheck {
  checkpoints: number;
  problems: string[];
}

/** Replay a whole recorded stream, verifying the client state against every
 * snapshot item encountered (the acceptance check for the map view). */
export function verifyStreamReplay(items: StreamItem[]): ReplayCheck {
  let state: WorldState | null = null;
  let checkpoints = 0;
  const problems: string[] = [];
  for (const item of items) {
    if (item.type === "snapshot") {
      const doc = item.payload as SnapshotDoc;
      if (state === null) {
        state = fromSnapshot(doc);
      } else {
        checkpoints += 1;
        for (const problem of diffAgainstSnapshot(state, doc)) {
          problems.push(`at snapshot step ${doc.clock}: ${problem}`);
        }
        state.clock = doc.clock;
      }
    } else if (item.type === "record" && state !== null) {
      applyRecord(state, item.payload as RecordDoc);
    } else if (item.type === "gap") {
      // A gap invalidates incremental state; callers resubscribe from a
      // fresh snapshot. For recorded fixtures a gap is a failure.
      problems.push(`gap at seq ${item.seq}`);
    }
  }
  return { checkpoints, problems };
}
