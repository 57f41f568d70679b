/**
 * Shapes of the two config files the questionnaire consumes. These are
 * the same JSON documents the scoring CLI reads, served statically, so
 * the UI never carries its own copy of the data model.
 */

export interface FeatureDef {
  code: string;
  name: string;
  unit: string;
  source: string;
  x_min: number;
  x_max: number;
  range_note?: string;
}

export interface SubCategory {
  code: string;
  name: string;
  features: FeatureDef[];
}

export interface Category {
  code: string;
  name: string;
  sub_categories: SubCategory[];
}

export interface Taxonomy {
  version: string;
  categories: Category[];
}

export interface ScenarioBlock {
  code: string;
  name: string;
  description?: string;
}

export interface ScenarioConfig {
  version: string;
  scenarios: ScenarioBlock[];
}

/** A canonically ordered comparison pair (taxonomy order, left first). */
export interface QuestionPair {
  kind: "subcategory" | "feature";
  left: string;
  right: string;
  /** sub-category the pair belongs to; for sub-category pairs, "" */
  group: string;
}

export const SCALE_MIN = -5;
export const SCALE_MAX = 5;

/** Anchor labels of the comparison scale. */
export const SCALE_ANCHORS: Record<number, string> = {
  0: "equal importance",
  3: "essential or strong",
  5: "extreme",
};

export function subcategories(taxonomy: Taxonomy): SubCategory[] {
  return taxonomy.categories.flatMap((c) => c.sub_categories);
}

export function categoryOf(taxonomy: Taxonomy, subCode: string): Category {
  const found = taxonomy.categories.find((c) =>
    c.sub_categories.some((s) => s.code === subCode),
  );
  if (!found) throw new Error(`unknown sub-category ${subCode}`);
  return found;
}
