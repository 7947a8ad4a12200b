import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseSpec, pyFloat, serializeSpec } from "../src/schema.js";

const PRESET_DIR = join(__dirname, "..", "fixtures", "presets");

describe("shared schema round trip", () => {
  const names = readdirSync(PRESET_DIR).filter((n) => n.endsWith(".json"));

  it("covers all ten presets", () => {
    expect(names.length).toBe(10);
  });

  for (const name of names) {
    it(`re-serializes ${name} byte-identically`, () => {
      const bytes = readFileSync(join(PRESET_DIR, name), "utf-8");
      const spec = parseSpec(JSON.parse(bytes));
      expect(serializeSpec(spec)).toBe(bytes);
    });
  }

  it("edited values keep the canonical layout", () => {
    const bytes = readFileSync(join(PRESET_DIR, "culprit-shock.json"), "utf-8");
    const spec = parseSpec(JSON.parse(bytes));
    const edited = { ...spec, rule: { ...spec.rule, c: 0.772 } };
    const text = serializeSpec(edited);
    expect(text).toContain('"c": 0.772');
    // still parses and round-trips through itself
    expect(serializeSpec(parseSpec(JSON.parse(text)))).toBe(text);
  });

  it("omits a null threshold (the calibration shape)", () => {
    const bytes = readFileSync(join(PRESET_DIR, "fig1-neutral.json"), "utf-8");
    const spec = parseSpec(JSON.parse(bytes));
    const text = serializeSpec({ ...spec, rule: { ...spec.rule, c: null } });
    expect(text).not.toContain('"c":');
    expect(text).toContain('"margin": 0.0');
  });

  it("rejects malformed documents with field paths", () => {
    expect(() => parseSpec({ endpoint: "nope" })).toThrow(/endpoint/);
    expect(() => parseSpec({
      endpoint: "binary_single",
      analysis_prior: { kind: "beta", alpha: 1, beta: 1 },
      design_prior: { kind: "beta", alpha: 1, beta: 1 },
      rule: { margin: "x", c: 0.9, direction: "greater" },
    })).toThrow(/rule\.margin/);
  });
});

describe("python-compatible float text", () => {
  it("writes integral floats with a trailing .0", () => {
    expect(pyFloat(1000)).toBe("1000.0");
    expect(pyFloat(0)).toBe("0.0");
    expect(pyFloat(-3)).toBe("-3.0");
  });

  it("keeps shortest round-trip decimals", () => {
    expect(pyFloat(0.5343065693430656)).toBe("0.5343065693430656");
    expect(pyFloat(0.15)).toBe("0.15");
    expect(pyFloat(0.975)).toBe("0.975");
  });

  it("pads exponents to two digits", () => {
    expect(pyFloat(1e-7)).toBe("1e-07");
    expect(pyFloat(2.5e-8)).toBe("2.5e-08");
  });
});
