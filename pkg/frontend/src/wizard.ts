// Scenario wizard: a multi-step form that assembles a scenario document and
// leans on the server for validation. All diagnostics shown inline are the
// server's text, verbatim; the wizard itself only checks that required
// fields are filled.

import type { Diagnostic } from "./types.js";

export interface MemberInput {
  name: string;
  role: string;
  trust_level: "low" | "high" | "unspecified";
  skills?: string[];
}

export interface EntityInput {
  name: string;
  kind: string;
  region?: string;
  critical?: boolean;
}

export interface WizardInputs {
  id: string;
  title: string;
  description: string;
  seed: number;
  maxSteps: number;
  width: number;
  height: number;
  numRegions: number;
  regionNames: string[];
  members: MemberInput[];
  entities: EntityInput[];
  goalStatement: string;
  goalKind: string; // entity kind the mission collects
  goalRegion: string; // destination region
}

export function defaultInputs(): WizardInputs {
  return {
    id: "studio-scenario",
    title: "New mission",
    description: "",
    seed: 7,
    maxSteps: 2000,
    width: 32,
    height: 32,
    numRegions: 8,
    regionNames: ["Hospital"],
    members: [{ name: "Ava", role: "Transporter", trust_level: "high" }],
    entities: [{ name: "victim-1", kind: "victim", critical: false }],
    goalStatement: "Bring every victim to the Hospital.",
    goalKind: "victim",
    goalRegion: "Hospital",
  };
}

/** Builds the scenario document. JSON is a YAML subset, so the output is a
 * valid scenario file and byte-stable for a given set of inputs. */
export function buildScenarioDocument(inputs: WizardInputs): string {
  const doc = {
    format_version: 1,
    id: inputs.id,
    title: inputs.title,
    description: inputs.description,
    seed: inputs.seed,
    max_steps: inputs.maxSteps,
    env: {
      width: inputs.width,
      height: inputs.height,
      num_regions: inputs.numRegions,
      region_names: inputs.regionNames,
    },
    members: inputs.members.map((member) => ({
      name: member.name,
      role: member.role,
      trust_level: member.trust_level,
      ...(member.skills && member.skills.length ? { skills: member.skills } : {}),
    })),
    entities: inputs.entities.map((entity) => ({
      name: entity.name,
      kind: entity.kind,
      interactive: true,
      ...(entity.region ? { region: entity.region } : {}),
      ...(entity.critical ? { attributes: { severity: "critical" } } : {}),
    })),
    goal: {
      statement: inputs.goalStatement,
      predicate: inputs.entities.length
        ? { all_entities_in_region: { kind: inputs.goalKind, region: inputs.goalRegion } }
        : "always_false",
    },
  };
  return JSON.stringify(doc, null, 1);
}

/** Local completeness checks only; semantic validation is the server's job. */
export function missingFields(inputs: WizardInputs): string[] {
  const missing: string[] = [];
  if (!inputs.id.trim()) missing.push("id");
  if (!inputs.members.length) missing.push("members");
  for (const [i, member] of inputs.members.entries()) {
    if (!member.name.trim()) missing.push(`members[${i}].name`);
  }
  if (!inputs.goalStatement.trim()) missing.push("goal statement");
  if (!Number.isInteger(inputs.seed) || inputs.seed < 0) missing.push("seed");
  if (inputs.maxSteps < 1) missing.push("max steps");
  return missing;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Inline diagnostics list; the message text is the server's, untouched. */
export function renderDiagnostics(diagnostics: Diagnostic[]): string {
  if (!diagnostics.length) return "";
  return diagnostics
    .map(
      (diag) =>
        `<div class="diagnostic ${diag.severity}">` +
        `<span class="path">${escapeHtml(diag.path)}</span> ` +
        `<span class="message">${escapeHtml(diag.message)}</span></div>`,
    )
    .join("\n");
}

/** The raw text a diagnostic row displays (used by tests to compare verbatim). */
export function diagnosticDisplayText(diag: Diagnostic): string {
  return diag.message;
}
