/**
 * Deterministic session used for the cross-language round-trip fixture:
 * the exported file is committed and re-parsed by the ingesting side's
 * test suite, so this must stay reproducible run to run.
 */

import { buildQuestionQueue, pairKey } from "./queue.js";
import { SessionState } from "./session.js";
import { Taxonomy } from "./types.js";

export function fixtureSession(taxonomy: Taxonomy): SessionState {
  const keptCategories = ["HW", "NT"];
  const keptSubcategories = ["SNA", "OUT", "SRD"];
  const state: SessionState = {
    responseId: "fixture-0001",
    step: "done",
    scenario: "data_exfiltration",
    demographics: {
      years_academic: "6",
      years_industry: "3",
      education: "M.Sc., computer science", // comma exercises CSV quoting
    },
    keptCategories,
    keptSubcategories,
    answers: {},
  };
  const queue = buildQuestionQueue(
    new Set(keptCategories),
    new Set(keptSubcategories),
    taxonomy,
  );
  queue.forEach((pair, i) => {
    state.answers[pairKey(pair)] = ((i * 3) % 11) - 5; // covers -5..+5
  });
  return state;
}
