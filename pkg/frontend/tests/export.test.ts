import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { CSV_HEADER, exportResponse, parseResponseCsv } from "../src/export.js";
import { fixtureSession } from "../src/fixture.js";
import { buildQuestionQueue, pairKey } from "../src/queue.js";
import { answer, newSession } from "../src/session.js";
import { subcategories } from "../src/types.js";
import { fixturePath, loadTaxonomy } from "./helpers.js";

const taxonomy = loadTaxonomy();
const ALL_CATS = new Set(taxonomy.categories.map((c) => c.code));
const ALL_SUBS = new Set(subcategories(taxonomy).map((s) => s.code));

function completeSession() {
  const state = newSession();
  state.scenario = "ddos_flooding";
  state.keptCategories = [...ALL_CATS];
  state.keptSubcategories = [...ALL_SUBS];
  const queue = buildQuestionQueue(ALL_CATS, ALL_SUBS, taxonomy);
  queue.forEach((pair, i) => answer(state, pair, ((i * 7) % 11) - 5));
  return { state, queue };
}

describe("exportResponse", () => {
  it("round-trips judgments losslessly through the file format", () => {
    const { state, queue } = completeSession();
    const parsed = parseResponseCsv(exportResponse(state, taxonomy));
    expect(parsed.scenario).toBe("ddos_flooding");
    expect(parsed.keptCategories).toEqual([...ALL_CATS]);
    expect(parsed.subcatJudgments.size).toBe(21);
    expect(parsed.featureJudgments.size).toBe(57);
    for (const pair of queue) {
      const judged =
        pair.kind === "subcategory" ? parsed.subcatJudgments : parsed.featureJudgments;
      expect(judged.get(`${pair.left}|${pair.right}`)).toBe(
        state.answers[pairKey(pair)],
      );
    }
  });

  it("keeps canonical pair orientation for a +5-right answer", () => {
    const state = newSession();
    state.scenario = "bot_scanning";
    state.keptCategories = ["HW"];
    state.keptSubcategories = ["SNA", "RSR"];
    const queue = buildQuestionQueue(new Set(["HW"]), new Set(["SNA", "RSR"]), taxonomy);
    answer(state, queue[0], 5); // slider pushed to "+5 right" on (SNA, RSR)
    const csv = exportResponse(state, taxonomy);
    expect(csv).toContain("judgment_subcat,SNA,RSR,5");
  });

  it("flags a partial session and omits unanswered pairs", () => {
    const state = newSession();
    state.scenario = "cc_communication";
    state.keptCategories = ["HW"];
    state.keptSubcategories = ["SNA", "RSR"];
    const queue = buildQuestionQueue(new Set(["HW"]), new Set(["SNA", "RSR"]), taxonomy);
    answer(state, queue[0], -2);
    const csv = exportResponse(state, taxonomy);
    const parsed = parseResponseCsv(csv);
    expect(parsed.demographics["partial"]).toBe("1");
    expect(parsed.subcatJudgments.size + parsed.featureJudgments.size).toBe(1);
  });

  it("rejects out-of-scale answers", () => {
    const { state } = completeSession();
    const queue = buildQuestionQueue(ALL_CATS, ALL_SUBS, taxonomy);
    expect(() => answer(state, queue[0], 6)).toThrow(/\[-5, 5\]/);
    expect(() => answer(state, queue[0], 1.5)).toThrow(/integer/);
  });

  it("quotes fields containing commas", () => {
    const state = newSession();
    state.scenario = "ddos_flooding";
    state.keptCategories = ["HW"];
    state.keptSubcategories = ["SNA"];
    state.demographics["education"] = "M.Sc., computer science";
    const csv = exportResponse(state, taxonomy);
    expect(csv).toContain('"M.Sc., computer science"');
    const parsed = parseResponseCsv(csv);
    expect(parsed.demographics["education"]).toBe("M.Sc., computer science");
  });

  it("matches the committed cross-language fixture byte for byte", () => {
    const regenerated = exportResponse(fixtureSession(taxonomy), taxonomy);
    const committed = readFileSync(fixturePath("exported_response.csv"), "utf-8");
    expect(regenerated).toBe(committed);
    expect(regenerated.startsWith(CSV_HEADER + "\n")).toBe(true);
  });
});
