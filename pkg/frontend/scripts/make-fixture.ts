/**
 * Writes fixtures/exported_response.csv (via the real exporter) plus an
 * expected-values JSON used by the ingesting side's tests. Run through
 * the compiled output: `npm run make-fixture`.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { exportResponse } from "../src/export.js";
import { fixtureSession } from "../src/fixture.js";
import { buildQuestionQueue, pairKey } from "../src/queue.js";
import { Taxonomy } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const frontendRoot = join(here, "..", "..");
const taxonomy = JSON.parse(
  readFileSync(join(frontendRoot, "config", "taxonomy.json"), "utf-8"),
) as Taxonomy;

const state = fixtureSession(taxonomy);
const csv = exportResponse(state, taxonomy);

const queue = buildQuestionQueue(
  new Set(state.keptCategories),
  new Set(state.keptSubcategories),
  taxonomy,
);
const subcat: Record<string, number> = {};
const feature: Record<string, number> = {};
for (const pair of queue) {
  const value = state.answers[pairKey(pair)];
  const target = pair.kind === "subcategory" ? subcat : feature;
  target[`${pair.left}|${pair.right}`] = value;
}

const expected = {
  response_id: state.responseId,
  scenario: state.scenario,
  kept_categories: state.keptCategories,
  kept_subcategories: state.keptSubcategories,
  subcategory_judgments: subcat,
  feature_judgments: feature,
  demographics: state.demographics,
};

const outDir = join(frontendRoot, "fixtures");
mkdirSync(outDir, { recursive: true });
writeFileSync(join(outDir, "exported_response.csv"), csv);
writeFileSync(
  join(outDir, "exported_response.expected.json"),
  JSON.stringify(expected, null, 2) + "\n",
);
console.log(`wrote ${queue.length}-answer fixture to ${outDir}`);
