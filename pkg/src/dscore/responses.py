"""Expert questionnaire responses: parsing, validation and fill-in.

Response file schema (CSV, UTF-8, header row)::

    response_id,scenario,record_kind,left_code,right_code,value

with ``record_kind`` one of:

* ``keep_category``   -- left_code = category code, value 1 (kept) or 0
* ``keep_subcategory`` -- left_code = sub-category code, value 1 or 0
* ``judgment_subcat`` -- left/right = sub-category codes, value in [-5, +5]
* ``judgment_feature`` -- left/right = feature codes of one sub-category,
  value in [-5, +5]
* ``demographic``     -- left_code = key (e.g. years_academic), value free-form

Judgment sign convention: a negative value favors the left-hand element,
a positive value favors the right-hand element; 0 means equal importance.
Pairs are canonicalized to taxonomy order (left = earlier element), so a
row given in the opposite order is flipped and its value negated.

One response addresses exactly one attack scenario; an expert covering
several scenarios submits one response per scenario under distinct ids.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCohortError, ParseError
from .taxonomy import Taxonomy

RECORD_KINDS = (
    "keep_category",
    "keep_subcategory",
    "judgment_subcat",
    "judgment_feature",
    "demographic",
)
JUDGMENT_LIMIT = 5

Pair = tuple[str, str]


@dataclass(frozen=True)
class ExpertResponse:
    """One expert's filtering choices and pairwise judgments for one scenario."""

    response_id: str
    scenario: str
    kept_categories: frozenset[str]
    kept_subcategories: frozenset[str]
    subcategory_judgments: dict[Pair, int]
    feature_judgments: dict[Pair, int]
    demographics: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CompletedResponse:
    """An ExpertResponse whose judgment maps are total over the taxonomy.

    ``quality_flags`` records pairs between two *kept* elements that the
    respondent never judged (filled in as 0 and worth reviewing).
    """

    response_id: str
    scenario: str
    kept_categories: frozenset[str]
    kept_subcategories: frozenset[str]
    subcategory_judgments: dict[Pair, int]
    feature_judgments: dict[Pair, int]
    demographics: dict[str, str]
    quality_flags: tuple[str, ...] = ()


def _canonical_pair(left: str, right: str, order: dict[str, int], value: int) -> tuple[Pair, int]:
    if order[left] <= order[right]:
        return (left, right), value
    return (right, left), -value


def parse_responses(source, taxonomy: Taxonomy) -> list[ExpertResponse]:
    """Parse a response file into one ExpertResponse per response_id.

    ``source`` is a path or an open text file. All schema problems are
    collected and raised together as a ParseError naming field and line.
    """
    if hasattr(source, "read"):
        return _parse(source, taxonomy)
    with open(source, encoding="utf-8", newline="") as fh:
        return _parse(fh, taxonomy)


def _parse(fh, taxonomy: Taxonomy) -> list[ExpertResponse]:
    reader = csv.DictReader(fh)
    required = {"response_id", "scenario", "record_kind", "left_code", "right_code", "value"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        missing = sorted(required - set(reader.fieldnames or []))
        raise ParseError(f"response file header is missing columns: {', '.join(missing)}")

    sub_order = {c: i for i, c in enumerate(taxonomy.subcategory_codes())}
    feat_order = {c: i for i, c in enumerate(taxonomy.feature_codes())}
    category_codes = set(taxonomy.category_codes())

    problems: list[str] = []
    # accumulator per response_id, in file order
    acc: dict[str, dict] = {}

    def bucket(rid: str, scenario: str, line: int) -> dict:
        entry = acc.get(rid)
        if entry is None:
            entry = acc[rid] = {
                "scenario": scenario,
                "kept_categories": set(),
                "kept_subcategories": set(),
                "subcat": {},
                "feat": {},
                "demo": {},
            }
        elif entry["scenario"] != scenario:
            problems.append(
                f"line {line}: response {rid!r} switches scenario "
                f"from {entry['scenario']!r} to {scenario!r}"
            )
        return entry

    for line, row in enumerate(reader, start=2):
        rid = (row.get("response_id") or "").strip()
        scenario = (row.get("scenario") or "").strip()
        kind = (row.get("record_kind") or "").strip()
        left = (row.get("left_code") or "").strip()
        right = (row.get("right_code") or "").strip()
        value = (row.get("value") or "").strip()

        if not rid:
            problems.append(f"line {line}: empty response_id")
            continue
        if not scenario:
            problems.append(f"line {line}: empty scenario")
            continue
        if kind not in RECORD_KINDS:
            problems.append(f"line {line}: unknown record_kind {kind!r}")
            continue
        entry = bucket(rid, scenario, line)

        if kind == "demographic":
            entry["demo"][left] = value
            continue

        if kind in ("keep_category", "keep_subcategory"):
            codes = category_codes if kind == "keep_category" else sub_order
            if left not in codes:
                problems.append(f"line {line}: {kind} names unknown code {left!r}")
                continue
            kept = value not in ("0", "false", "False")
            if kept:
                key = "kept_categories" if kind == "keep_category" else "kept_subcategories"
                entry[key].add(left)
            continue

        # judgment rows
        order = sub_order if kind == "judgment_subcat" else feat_order
        target = entry["subcat"] if kind == "judgment_subcat" else entry["feat"]
        if left not in order or right not in order:
            bad = left if left not in order else right
            problems.append(f"line {line}: {kind} names unknown code {bad!r}")
            continue
        if left == right:
            problems.append(f"line {line}: {kind} compares {left!r} with itself")
            continue
        if kind == "judgment_feature":
            sub_l = taxonomy.subcategory_of_feature(left)
            sub_r = taxonomy.subcategory_of_feature(right)
            if sub_l != sub_r:
                problems.append(
                    f"line {line}: feature pair ({left}, {right}) spans "
                    f"sub-categories {sub_l} and {sub_r}"
                )
                continue
        try:
            mag = int(value)
        except ValueError:
            problems.append(f"line {line}: value {value!r} for pair ({left}, {right}) is not an integer")
            continue
        if abs(mag) > JUDGMENT_LIMIT:
            problems.append(
                f"line {line}: judgment {mag} for pair ({left}, {right}) "
                f"outside [-{JUDGMENT_LIMIT}, +{JUDGMENT_LIMIT}]"
            )
            continue
        pair, mag = _canonical_pair(left, right, order, mag)
        if pair in target:
            problems.append(f"line {line}: duplicate judgment for pair {pair}")
            continue
        target[pair] = mag

    # structural checks per response
    subcats_of = {
        c.code: {s.code for s in c.sub_categories} for c in taxonomy.categories
    }
    for rid, entry in acc.items():
        allowed = set()
        for cat in entry["kept_categories"]:
            allowed |= subcats_of.get(cat, set())
        stray = entry["kept_subcategories"] - allowed
        if stray:
            problems.append(
                f"response {rid!r}: kept sub-categories {sorted(stray)} "
                "fall outside the kept categories"
            )

    if problems:
        raise ParseError("response file is invalid:\n  " + "\n  ".join(problems))

    return [
        ExpertResponse(
            response_id=rid,
            scenario=entry["scenario"],
            kept_categories=frozenset(entry["kept_categories"]),
            kept_subcategories=frozenset(entry["kept_subcategories"]),
            subcategory_judgments=dict(entry["subcat"]),
            feature_judgments=dict(entry["feat"]),
            demographics=dict(entry["demo"]),
        )
        for rid, entry in acc.items()
    ]


def parse_responses_text(text: str, taxonomy: Taxonomy) -> list[ExpertResponse]:
    """Convenience wrapper for parsing an in-memory CSV string."""
    return parse_responses(io.StringIO(text), taxonomy)


def complete(response: ExpertResponse | CompletedResponse, taxonomy: Taxonomy) -> CompletedResponse:
    """Fill in the missing judgments so that every sub-category pair and
    every within-sub-category feature pair has a value.

    Rules: a pair with exactly one kept element gets magnitude 5 toward
    the kept one; a pair with neither element kept gets 0 (equally
    unimportant); a pair whose elements were both kept but never judged
    gets 0 and a quality flag. Existing judgments are never altered.
    The operation is idempotent.
    """
    kept = response.kept_subcategories
    flags: list[str] = []

    sub_codes = taxonomy.subcategory_codes()
    sub_j = dict(response.subcategory_judgments)
    for i, a in enumerate(sub_codes):
        for b in sub_codes[i + 1 :]:
            pair = (a, b)
            if pair in sub_j:
                continue
            a_kept, b_kept = a in kept, b in kept
            if a_kept and not b_kept:
                sub_j[pair] = -5
            elif b_kept and not a_kept:
                sub_j[pair] = 5
            else:
                sub_j[pair] = 0
                if a_kept and b_kept:
                    flags.append(f"kept sub-category pair ({a}, {b}) was never judged; filled 0")

    feat_j = dict(response.feature_judgments)
    for sub in taxonomy.subcategories():
        codes = [f.code for f in sub.features]
        sub_kept = sub.code in kept
        for i, a in enumerate(codes):
            for b in codes[i + 1 :]:
                pair = (a, b)
                if pair in feat_j:
                    continue
                feat_j[pair] = 0
                if sub_kept:
                    flags.append(f"kept feature pair ({a}, {b}) was never judged; filled 0")

    existing = getattr(response, "quality_flags", ())
    return CompletedResponse(
        response_id=response.response_id,
        scenario=response.scenario,
        kept_categories=response.kept_categories,
        kept_subcategories=response.kept_subcategories,
        subcategory_judgments=sub_j,
        feature_judgments=feat_j,
        demographics=dict(response.demographics),
        quality_flags=tuple(existing) + tuple(flags),
    )


def filtering_stats(responses: list[ExpertResponse], taxonomy: Taxonomy) -> dict:
    """Keep-fractions per category and sub-category, per scenario.

    Returns ``{scenario: {"responses": n, "categories": {code: fraction},
    "subcategories": {code: fraction}}}`` with raw fractions in [0, 1];
    rounding/percent formatting is left to the caller.
    """
    if not responses:
        raise EmptyCohortError("no responses to summarize")

    by_scenario: dict[str, list[ExpertResponse]] = {}
    for r in responses:
        by_scenario.setdefault(r.scenario, []).append(r)

    out: dict[str, dict] = {}
    for scenario in sorted(by_scenario):
        group = by_scenario[scenario]
        n = len(group)
        out[scenario] = {
            "responses": n,
            "categories": {
                code: sum(code in r.kept_categories for r in group) / n
                for code in taxonomy.category_codes()
            },
            "subcategories": {
                code: sum(code in r.kept_subcategories for r in group) / n
                for code in taxonomy.subcategory_codes()
            },
        }
    return out


def expected_pair_totals(taxonomy: Taxonomy) -> tuple[int, int]:
    """(sub-category pairs, feature pairs) a completed response must hold."""
    counts = taxonomy.pair_counts()
    return counts.subcategories, counts.features_total


def is_total(response: CompletedResponse, taxonomy: Taxonomy) -> bool:
    subs, feats = expected_pair_totals(taxonomy)
    return (
        len(response.subcategory_judgments) == subs
        and len(response.feature_judgments) == feats
    )
