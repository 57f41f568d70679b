/**
 * One respondent's session: the five questionnaire parts, the pending
 * question queue derived from filtering, and local persistence so an
 * interrupted session resumes in place.
 */

import { buildQuestionQueue, pairKey } from "./queue.js";
import { QuestionPair, SCALE_MAX, SCALE_MIN, Taxonomy } from "./types.js";

export type Step =
  | "background"
  | "demographics"
  | "scenario"
  | "filtering"
  | "comparisons"
  | "done";

export const STEPS: Step[] = [
  "background",
  "demographics",
  "scenario",
  "filtering",
  "comparisons",
  "done",
];

export interface SessionState {
  responseId: string;
  step: Step;
  scenario: string;
  demographics: Record<string, string>;
  keptCategories: string[];
  keptSubcategories: string[];
  answers: Record<string, number>; // pairKey -> judgment in [-5, +5]
}

const STORAGE_KEY = "dscore-questionnaire-session";

export function newSession(): SessionState {
  return {
    responseId: `resp-${Date.now().toString(36)}-${Math.floor(Math.random() * 1e6).toString(36)}`,
    step: "background",
    scenario: "",
    demographics: {},
    keptCategories: [],
    keptSubcategories: [],
    answers: {},
  };
}

export function pendingPairs(state: SessionState, taxonomy: Taxonomy): QuestionPair[] {
  return buildQuestionQueue(
    new Set(state.keptCategories),
    new Set(state.keptSubcategories),
    taxonomy,
  );
}

export function unanswered(state: SessionState, taxonomy: Taxonomy): QuestionPair[] {
  return pendingPairs(state, taxonomy).filter(
    (p) => !(pairKey(p) in state.answers),
  );
}

export function answer(state: SessionState, pair: QuestionPair, value: number): void {
  if (!Number.isInteger(value) || value < SCALE_MIN || value > SCALE_MAX) {
    throw new Error(`judgment must be an integer in [${SCALE_MIN}, ${SCALE_MAX}]`);
  }
  state.answers[pairKey(pair)] = value;
}

/** Dropping an element mid-filtering invalidates answers that mention it. */
export function pruneAnswers(state: SessionState, taxonomy: Taxonomy): void {
  const valid = new Set(pendingPairs(state, taxonomy).map(pairKey));
  for (const key of Object.keys(state.answers)) {
    if (!valid.has(key)) delete state.answers[key];
  }
}

export function isComplete(state: SessionState, taxonomy: Taxonomy): boolean {
  return unanswered(state, taxonomy).length === 0;
}

export function save(state: SessionState, storage: Storage = localStorage): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(state));
}

export function load(storage: Storage = localStorage): SessionState | null {
  const raw = storage.getItem(STORAGE_KEY);
  if (!raw) return null;
  try {
    return JSON.parse(raw) as SessionState;
  } catch {
    return null;
  }
}

export function clear(storage: Storage = localStorage): void {
  storage.removeItem(STORAGE_KEY);
}
