import { describe, expect, it } from "vitest";

import { buildScenarioDocument, defaultInputs, diagnosticDisplayText, missingFields, renderDiagnostics } from "../src/wizard.js";

describe("wizard document assembly", () => {
  it("emits a complete versioned document", () => {
    const doc = JSON.parse(buildScenarioDocument(defaultInputs()));
    expect(doc.format_version).toBe(1);
    expect(doc.seed).toBe(7);
    expect(doc.env.num_regions).toBe(8);
    expect(doc.members[0].name).toBe("Ava");
    expect(doc.goal.predicate.all_entities_in_region).toEqual({ kind: "victim", region: "Hospital" });
  });

  it("is byte-stable for identical inputs", () => {
    expect(buildScenarioDocument(defaultInputs())).toBe(buildScenarioDocument(defaultInputs()));
  });

  it("uses always_false when no entities are declared", () => {
    const inputs = defaultInputs();
    inputs.entities = [];
    const doc = JSON.parse(buildScenarioDocument(inputs));
    expect(doc.goal.predicate).toBe("always_false");
  });

  it("flags missing required fields locally", () => {
    const inputs = defaultInputs();
    inputs.id = " ";
    inputs.members = [{ name: "", role: "Searcher", trust_level: "unspecified" }];
    const missing = missingFields(inputs);
    expect(missing).toContain("id");
    expect(missing).toContain("members[0].name");
  });
});

describe("diagnostics rendering", () => {
  it("shows the server message verbatim", () => {
    const diag = {
      severity: "error",
      path: "env.num_regions",
      message: "insufficient area: 99 regions of at least 3x3 cells cannot fit 1024 cells",
    };
    expect(diagnosticDisplayText(diag)).toBe(diag.message);
    const html = renderDiagnostics([diag]);
    expect(html).toContain("insufficient area: 99 regions of at least 3x3 cells cannot fit 1024 cells");
    expect(html).toContain("env.num_regions");
  });

  it("escapes markup but preserves text", () => {
    const html = renderDiagnostics([{ severity: "error", path: "", message: 'bad "<tag>"' }]);
    expect(html).toContain("bad &quot;&lt;tag&gt;&quot;");
  });
});
