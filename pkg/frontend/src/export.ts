/**
 * Response-file export. The produced CSV follows the ingestion schema
 * exactly:
 *
 *   response_id,scenario,record_kind,left_code,right_code,value
 *
 * with record_kind in {keep_category, keep_subcategory, judgment_subcat,
 * judgment_feature, demographic}. Pairs are emitted in canonical taxonomy
 * order; a negative value favors the left element, positive the right.
 * Unanswered pairs are omitted (the ingesting side applies the fill-in
 * rule), and a partial submission is flagged with a `partial` demographic
 * row so it surfaces in quality reports.
 */

import { pairKey } from "./queue.js";
import { SessionState, pendingPairs, unanswered } from "./session.js";
import { Taxonomy, subcategories } from "./types.js";

export const CSV_HEADER = "response_id,scenario,record_kind,left_code,right_code,value";

function field(text: string): string {
  if (/[",\n\r]/.test(text)) {
    return `"${text.replace(/"/g, '""')}"`;
  }
  return text;
}

function row(
  responseId: string,
  scenario: string,
  kind: string,
  left: string,
  right: string,
  value: string | number,
): string {
  return [responseId, scenario, kind, left, right, String(value)]
    .map(field)
    .join(",");
}

export function exportResponse(state: SessionState, taxonomy: Taxonomy): string {
  if (!state.scenario) {
    throw new Error("select an attack scenario before exporting");
  }
  const lines = [CSV_HEADER];
  const rid = state.responseId;
  const scenario = state.scenario;

  for (const cat of taxonomy.categories) {
    if (state.keptCategories.includes(cat.code)) {
      lines.push(row(rid, scenario, "keep_category", cat.code, "", 1));
    }
  }
  for (const sub of subcategories(taxonomy)) {
    if (state.keptSubcategories.includes(sub.code)) {
      lines.push(row(rid, scenario, "keep_subcategory", sub.code, "", 1));
    }
  }
  for (const pair of pendingPairs(state, taxonomy)) {
    const value = state.answers[pairKey(pair)];
    if (value === undefined) continue;
    const kind = pair.kind === "subcategory" ? "judgment_subcat" : "judgment_feature";
    lines.push(row(rid, scenario, kind, pair.left, pair.right, value));
  }
  for (const key of Object.keys(state.demographics).sort()) {
    lines.push(row(rid, scenario, "demographic", key, "", state.demographics[key]));
  }
  if (unanswered(state, taxonomy).length > 0) {
    lines.push(row(rid, scenario, "demographic", "partial", "", 1));
  }
  return lines.join("\n") + "\n";
}

export function exportFileName(state: SessionState): string {
  return `response_${state.scenario}_${state.responseId}.csv`;
}

/** Browser download helper; kept apart from export so tests stay pure. */
export function downloadResponse(state: SessionState, taxonomy: Taxonomy): void {
  const blob = new Blob([exportResponse(state, taxonomy)], {
    type: "text/csv;charset=utf-8",
  });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = exportFileName(state);
  link.click();
  URL.revokeObjectURL(link.href);
}

export interface ParsedResponse {
  responseId: string;
  scenario: string;
  keptCategories: string[];
  keptSubcategories: string[];
  subcatJudgments: Map<string, number>;
  featureJudgments: Map<string, number>;
  demographics: Record<string, string>;
}

function splitCsvLine(line: string): string[] {
  const out: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        cur += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      out.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  out.push(cur);
  return out;
}

/** Schema reader used to verify exported files round-trip losslessly. */
export function parseResponseCsv(text: string): ParsedResponse {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines[0] !== CSV_HEADER) {
    throw new Error(`unexpected header: ${lines[0]}`);
  }
  const parsed: ParsedResponse = {
    responseId: "",
    scenario: "",
    keptCategories: [],
    keptSubcategories: [],
    subcatJudgments: new Map(),
    featureJudgments: new Map(),
    demographics: {},
  };
  for (const line of lines.slice(1)) {
    const [rid, scenario, kind, left, right, value] = splitCsvLine(line);
    parsed.responseId = rid;
    parsed.scenario = scenario;
    switch (kind) {
      case "keep_category":
        parsed.keptCategories.push(left);
        break;
      case "keep_subcategory":
        parsed.keptSubcategories.push(left);
        break;
      case "judgment_subcat":
        parsed.subcatJudgments.set(`${left}|${right}`, Number(value));
        break;
      case "judgment_feature":
        parsed.featureJudgments.set(`${left}|${right}`, Number(value));
        break;
      case "demographic":
        parsed.demographics[left] = value;
        break;
      default:
        throw new Error(`unknown record_kind ${kind}`);
    }
  }
  return parsed;
}
