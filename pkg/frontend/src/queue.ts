/**
 * Question-queue construction from the preliminary-filtering choices.
 *
 * The queue holds the sub-category pairs among kept sub-categories first,
 * then the feature pairs inside each kept sub-category, all in taxonomy
 * order with canonically ordered pairs (left = earlier element). Dropped
 * elements never appear, which is the whole point of the filtering step.
 */

import { QuestionPair, Taxonomy, subcategories } from "./types.js";

export function buildQuestionQueue(
  keptCategories: ReadonlySet<string>,
  keptSubcategories: ReadonlySet<string>,
  taxonomy: Taxonomy,
): QuestionPair[] {
  const allSubs = subcategories(taxonomy);
  const allowed = new Set(
    taxonomy.categories
      .filter((c) => keptCategories.has(c.code))
      .flatMap((c) => c.sub_categories.map((s) => s.code)),
  );
  for (const code of keptSubcategories) {
    if (!allowed.has(code)) {
      throw new Error(
        `sub-category ${code} is kept but its category is not`,
      );
    }
  }

  const kept = allSubs.filter((s) => keptSubcategories.has(s.code));
  const queue: QuestionPair[] = [];
  for (let i = 0; i < kept.length; i++) {
    for (let j = i + 1; j < kept.length; j++) {
      queue.push({
        kind: "subcategory",
        left: kept[i].code,
        right: kept[j].code,
        group: "",
      });
    }
  }
  for (const sub of kept) {
    for (let i = 0; i < sub.features.length; i++) {
      for (let j = i + 1; j < sub.features.length; j++) {
        queue.push({
          kind: "feature",
          left: sub.features[i].code,
          right: sub.features[j].code,
          group: sub.code,
        });
      }
    }
  }
  return queue;
}

export function pairKey(pair: QuestionPair): string {
  return `${pair.kind}:${pair.left}|${pair.right}`;
}
