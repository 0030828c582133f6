// 2D canvas map: static tiles from the snapshot, dynamic markers from the
// replayed world state, with agent motion interpolated between delta steps.
// Tile computation is pure; only drawMap touches a canvas.

import type { Cell, SnapshotDoc } from "./types.js";
import type { WorldState } from "./replay.js";

export const TILE_WALL = 0;
export const TILE_OPEN = 1;
export const TILE_DOOR = 2;

export interface MapStatics {
  width: number;
  height: number;
  tiles: Uint8Array; // row-major TILE_* values
  regionLabels: { name: string; x: number; y: number }[];
}

export interface Marker {
  name: string;
  kind: string; // "agent" or the entity kind
  x: number; // cell coordinates, fractional while interpolating
  y: number;
  note: string;
}

export function decodeTiles(doc: SnapshotDoc): MapStatics {
  const { width, height, rows } = doc.grid;
  const tiles = new Uint8Array(width * height);
  rows.forEach((runs, y) => {
    let x = 0;
    let value = TILE_WALL;
    for (const run of runs) {
      for (let i = 0; i < run; i++) tiles[y * width + x++] = value;
      value = value === TILE_WALL ? TILE_OPEN : TILE_WALL;
    }
  });
  for (const [x, y] of doc.doors.map((d) => [d[0], d[1]] as Cell)) {
    tiles[y * width + x] = TILE_DOOR;
  }
  const regionLabels = doc.regions.map((region) => ({
    name: region.name,
    x: (region.bounds[0] + region.bounds[2]) / 2,
    y: (region.bounds[1] + region.bounds[3]) / 2,
  }));
  return { width, height, tiles, regionLabels };
}

export function buildMarkers(state: WorldState): Marker[] {
  const markers: Marker[] = [];
  for (const [entity, placement] of state.placements) {
    if (placement.cell === null) continue; // carried: rides its carrier
    const attrs = state.attributes.get(entity) ?? {};
    const note = attrs.severity === "critical" && attrs.stabilized !== "true" ? "critical" : "";
    markers.push({
      name: entity,
      kind: state.kinds.get(entity) ?? "entity",
      x: placement.cell[0],
      y: placement.cell[1],
      note,
    });
  }
  for (const [agent, cell] of state.agents) {
    const carrying = [...state.placements.entries()].find(([, p]) => p.carriedBy === agent);
    markers.push({
      name: agent,
      kind: "agent",
      x: cell[0],
      y: cell[1],
      note: carrying ? `carrying ${carrying[0]}` : "",
    });
  }
  return markers.sort((a, b) => a.name.localeCompare(b.name));
}

/** Positions eased between two states for smooth marker motion; t in [0,1]. */
export function interpolateMarkers(previous: Marker[], next: Marker[], t: number): Marker[] {
  const earlier = new Map(previous.map((m) => [m.name, m]));
  return next.map((marker) => {
    const from = earlier.get(marker.name);
    if (!from) return marker;
    return {
      ...marker,
      x: from.x + (marker.x - from.x) * t,
      y: from.y + (marker.y - from.y) * t,
    };
  });
}

const TILE_COLORS: Record<number, string> = {
  [TILE_WALL]: "#2b2b33",
  [TILE_OPEN]: "#e8e4d8",
  [TILE_DOOR]: "#c9a86a",
};

const MARKER_COLORS: Record<string, string> = {
  agent: "#2f6fed",
  victim: "#d64545",
  obstacle: "#6b6b6b",
};

export function drawMap(
  ctx: CanvasRenderingContext2D,
  statics: MapStatics,
  markers: Marker[],
  cellPx: number,
): void {
  ctx.canvas.width = statics.width * cellPx;
  ctx.canvas.height = statics.height * cellPx;
  for (let y = 0; y < statics.height; y++) {
    for (let x = 0; x < statics.width; x++) {
      ctx.fillStyle = TILE_COLORS[statics.tiles[y * statics.width + x]] ?? "#000";
      ctx.fillRect(x * cellPx, y * cellPx, cellPx, cellPx);
    }
  }
  ctx.font = `${cellPx * 1.2}px sans-serif`;
  ctx.fillStyle = "#8a857a";
  ctx.textAlign = "center";
  for (const label of statics.regionLabels) {
    ctx.fillText(label.name, label.x * cellPx, label.y * cellPx);
  }
  for (const marker of markers) {
    const cx = (marker.x + 0.5) * cellPx;
    const cy = (marker.y + 0.5) * cellPx;
    ctx.beginPath();
    ctx.fillStyle = MARKER_COLORS[marker.kind] ?? "#3c9d58";
    ctx.arc(cx, cy, cellPx * (marker.kind === "agent" ? 0.42 : 0.3), 0, Math.PI * 2);
    ctx.fill();
    if (marker.note === "critical") {
      ctx.strokeStyle = "#ffd23f";
      ctx.lineWidth = 2;
      ctx.stroke();
    }
    if (marker.kind === "agent") {
      ctx.fillStyle = "#10131a";
      ctx.font = `${cellPx * 0.9}px sans-serif`;
      ctx.fillText(marker.name[0] ?? "?", cx, cy + cellPx * 0.3);
      ctx.font = `${cellPx * 1.2}px sans-serif`;
    }
  }
}
