"""Analytic-hierarchy-process engine.

Turns completed questionnaire responses into per-expert weight vectors
(principal right eigenvector of reciprocal comparison matrices), measures
judgment consistency, aggregates weights across experts and quantifies
inter-expert agreement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateDataError,
    EmptyCohortError,
    IncompleteJudgmentsError,
    InputError,
)
from .responses import CompletedResponse, Pair
from .taxonomy import Taxonomy

# Questionnaire magnitudes 0..5 mapped onto the 1..9 ratio scale:
# 0 = equal -> 1, 3 = essential/strong -> 5, 5 = extreme -> 9, with the
# remaining magnitudes interpolated monotonically.
SAATY_SCALE = {0: 1.0, 1: 2.0, 2: 3.0, 3: 5.0, 4: 7.0, 5: 9.0}

# Standard random-index table for the consistency ratio.
RANDOM_INDEX = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
    6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49,
}

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_CAP = 10_000


@dataclass(frozen=True)
class ComparisonMatrix:
    """Square reciprocal matrix of pairwise importance ratios."""

    labels: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        n = len(self.labels)
        m = self.entries
        if m.shape != (n, n):
            raise InputError(f"matrix shape {m.shape} does not match {n} labels")
        if np.any(m <= 0):
            raise InputError("comparison matrix entries must be positive")
        if np.any(m < 1 / 9 - 1e-12) or np.any(m > 9 + 1e-12):
            raise InputError("comparison matrix entries must lie in [1/9, 9]")
        if np.any(np.abs(np.diag(m) - 1.0) > 0):
            raise InputError("comparison matrix diagonal must be 1")
        if np.any(np.abs(m * m.T - 1.0) > 1e-12):
            raise InputError("comparison matrix is not reciprocal")


@dataclass(frozen=True)
class WeightVector:
    labels: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise InputError("labels/weights length mismatch")
        if np.any(self.weights < 0):
            raise InputError("weights must be non-negative")
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise InputError(f"weights sum to {self.weights.sum()}, expected 1")

    def as_dict(self) -> dict[str, float]:
        return {label: float(w) for label, w in zip(self.labels, self.weights)}

    def weight(self, label: str) -> float:
        return float(self.weights[self.labels.index(label)])


@dataclass(frozen=True)
class ConsistencyReport:
    lambda_max: float
    consistency_index: float
    consistency_ratio: float
    n: int


@dataclass(frozen=True)
class ResponseWeights:
    """Per-response output: weights plus the consistency bookkeeping used
    for quality filtering."""

    response_id: str
    scenario: str
    subcategory_weights: WeightVector
    feature_weights: WeightVector
    feature_crs: dict[str, float]  # sub-category code -> CR of its feature matrix
    subcategory_cr: float
    mean_cr: float  # mean over the feature matrices only


@dataclass(frozen=True)
class ScenarioWeights:
    """Averaged detectability weights for one attack scenario."""

    scenario: str
    feature_weights: WeightVector
    subcategory_weights: WeightVector
    contributing_responses: tuple[str, ...]
    mean_cr_per_response: dict[str, float]
    cr_threshold: float | None = None
    taxonomy_version: str = ""


def to_matrix(
    labels: tuple[str, ...] | list[str],
    judgments: dict[Pair, int],
    scale: dict[int, float] | None = None,
) -> ComparisonMatrix:
    """Build a reciprocal comparison matrix from -5..+5 judgments.

    Judgments are keyed by canonical pairs (taxonomy order); a negative
    value favors the left element, positive favors the right. Every pair
    over ``labels`` must be present. The mirrored entry is stored as the
    one-time reciprocal of its counterpart, never derived twice. A custom
    magnitude-to-ratio ``scale`` may replace the default interpolation.
    """
    scale = SAATY_SCALE if scale is None else scale
    labels = tuple(labels)
    n = len(labels)
    idx = {c: i for i, c in enumerate(labels)}
    entries = np.ones((n, n))

    missing = []
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            if (a, b) not in judgments:
                missing.append((a, b))
    if missing:
        raise IncompleteJudgmentsError(
            f"missing judgments for pairs: {missing[:5]}"
            + (f" (+{len(missing) - 5} more)" if len(missing) > 5 else "")
        )

    for (a, b), m in judgments.items():
        if a not in idx or b not in idx:
            continue  # judgment outside this element set
        if abs(m) > 5:
            raise InputError(f"judgment {m} for pair ({a}, {b}) outside [-5, +5]")
        s = scale[abs(m)]
        inv = 1.0 / s
        i, j = idx[a], idx[b]
        if m < 0:  # left (a) more important
            entries[i, j] = s
            entries[j, i] = inv
        elif m > 0:  # right (b) more important
            entries[i, j] = inv
            entries[j, i] = s
    return ComparisonMatrix(labels=labels, entries=entries)


def principal_weights(matrix: ComparisonMatrix) -> tuple[WeightVector, ConsistencyReport]:
    """Weights from the principal right eigenvector via power iteration.

    Iterates v <- Av with L1 normalization until successive iterates agree
    within 1e-10 (capped at 10,000 iterations). lambda_max is the Rayleigh
    quotient with the summing functional, sum(A w) for sum(w) = 1, which
    is exact for already-converged eigenvectors. CI = (lambda_max - n)/(n - 1)
    and CR = CI / RI(n), with CR defined as 0 for n <= 2.
    """
    a = matrix.entries
    n = len(matrix.labels)
    if n == 1:
        return (
            WeightVector(matrix.labels, np.array([1.0])),
            ConsistencyReport(lambda_max=1.0, consistency_index=0.0, consistency_ratio=0.0, n=1),
        )

    v = np.full(n, 1.0 / n)
    for _ in range(POWER_ITERATION_CAP):
        nxt = a @ v
        nxt /= nxt.sum()
        if float(np.max(np.abs(nxt - v))) <= POWER_ITERATION_TOL:
            v = nxt
            break
        v = nxt
    else:
        raise ConvergenceError(
            f"power iteration did not converge within {POWER_ITERATION_CAP} iterations",
            iterations=POWER_ITERATION_CAP,
        )

    lambda_max = float(np.sum(a @ v))
    ci = (lambda_max - n) / (n - 1)
    ri = RANDOM_INDEX.get(n, RANDOM_INDEX[10])
    cr = 0.0 if n <= 2 else ci / ri
    return (
        WeightVector(matrix.labels, v),
        ConsistencyReport(lambda_max=lambda_max, consistency_index=ci, consistency_ratio=cr, n=n),
    )


def geometric_mean_weights(matrix: ComparisonMatrix) -> WeightVector:
    """Row-geometric-mean approximation, kept as a cross-check for the
    eigenvector method."""
    g = np.exp(np.mean(np.log(matrix.entries), axis=1))
    return WeightVector(matrix.labels, g / g.sum())


def response_weights(
    response: CompletedResponse,
    taxonomy: Taxonomy,
    method: str = "eigenvector",
) -> ResponseWeights:
    """Per-expert weights: one 7-way sub-category matrix plus one feature
    matrix per sub-category; global feature weight = sub-category weight
    times within-sub-category weight. Mean CR averages the feature-matrix
    CRs only. ``method="geometric"`` swaps in the row-geometric-mean
    weights for cross-checking (consistency reports stay eigenvalue-based).
    """
    if method not in ("eigenvector", "geometric"):
        raise InputError(f"unknown weighting method {method!r}")

    def weights_of(matrix: ComparisonMatrix) -> tuple[WeightVector, ConsistencyReport]:
        vector, report = principal_weights(matrix)
        if method == "geometric":
            vector = geometric_mean_weights(matrix)
        return vector, report

    sub_codes = taxonomy.subcategory_codes()
    sub_matrix = to_matrix(sub_codes, response.subcategory_judgments)
    sub_weights, sub_report = weights_of(sub_matrix)

    feature_codes: list[str] = []
    global_weights: list[float] = []
    feature_crs: dict[str, float] = {}
    for sub in taxonomy.subcategories():
        codes = tuple(f.code for f in sub.features)
        w_sub = sub_weights.weight(sub.code)
        fmatrix = to_matrix(codes, response.feature_judgments)
        fweights, freport = weights_of(fmatrix)
        feature_crs[sub.code] = freport.consistency_ratio
        for code, w in zip(codes, fweights.weights):
            feature_codes.append(code)
            global_weights.append(w_sub * float(w))

    vec = np.asarray(global_weights)
    vec = vec / vec.sum()
    mean_cr = float(np.mean(list(feature_crs.values())))
    return ResponseWeights(
        response_id=response.response_id,
        scenario=response.scenario,
        subcategory_weights=sub_weights,
        feature_weights=WeightVector(tuple(feature_codes), vec),
        feature_crs=feature_crs,
        subcategory_cr=sub_report.consistency_ratio,
        mean_cr=mean_cr,
    )


def quality_metric(rw: ResponseWeights, include_subcategory_cr: bool = False) -> float:
    """The CR figure used for threshold filtering (sub-category matrix
    excluded by default)."""
    if not include_subcategory_cr:
        return rw.mean_cr
    crs = list(rw.feature_crs.values()) + [rw.subcategory_cr]
    return float(np.mean(crs))


def aggregate(
    fragments: list[ResponseWeights],
    cr_threshold: float | None = None,
    include_subcategory_cr: bool = False,
    taxonomy_version: str = "",
) -> ScenarioWeights:
    """Average per-expert weight vectors into one ScenarioWeights.

    Responses whose mean CR exceeds ``cr_threshold`` (when given) are
    dropped before averaging; the surviving vectors are averaged
    component-wise and renormalized. Output is invariant to input order.
    """
    if not fragments:
        raise EmptyCohortError("no responses to aggregate")
    scenarios = {f.scenario for f in fragments}
    if len(scenarios) != 1:
        raise InputError(f"responses address multiple scenarios: {sorted(scenarios)}")
    labels = fragments[0].feature_weights.labels
    sub_labels = fragments[0].subcategory_weights.labels
    for f in fragments:
        if f.feature_weights.labels != labels or f.subcategory_weights.labels != sub_labels:
            raise InputError("responses were computed against different taxonomies")

    metrics = {f.response_id: quality_metric(f, include_subcategory_cr) for f in fragments}
    if cr_threshold is None:
        retained = list(fragments)
    else:
        retained = [f for f in fragments if metrics[f.response_id] <= cr_threshold]
    if not retained:
        raise EmptyCohortError(
            f"all {len(fragments)} responses exceed the CR threshold {cr_threshold}"
        )

    retained = sorted(retained, key=lambda f: f.response_id)
    feat = np.mean([f.feature_weights.weights for f in retained], axis=0)
    feat /= feat.sum()
    sub = np.mean([f.subcategory_weights.weights for f in retained], axis=0)
    sub /= sub.sum()
    return ScenarioWeights(
        scenario=fragments[0].scenario,
        feature_weights=WeightVector(labels, feat),
        subcategory_weights=WeightVector(sub_labels, sub),
        contributing_responses=tuple(f.response_id for f in retained),
        mean_cr_per_response={rid: metrics[rid] for rid in sorted(metrics)},
        cr_threshold=cr_threshold,
        taxonomy_version=taxonomy_version,
    )


def agreement(vectors: list) -> float:
    """Mean cosine similarity over all unordered pairs of weight vectors.

    Accepts WeightVector instances or plain numeric sequences; all inputs
    must cover the same label set / length.
    """
    if len(vectors) < 2:
        raise InputError("agreement needs at least 2 weight vectors")
    labels = {v.labels for v in vectors if isinstance(v, WeightVector)}
    if len(labels) > 1:
        raise InputError("agreement requires identical label sets")
    arrays = [np.asarray(getattr(v, "weights", v), dtype=float) for v in vectors]
    if len({a.shape for a in arrays}) != 1:
        raise InputError("agreement requires vectors of identical length")
    sims = []
    for i, a in enumerate(arrays):
        for b in arrays[i + 1 :]:
            na = float(np.linalg.norm(a))
            nb = float(np.linalg.norm(b))
            if na == 0.0 or nb == 0.0:
                raise DegenerateDataError("cosine similarity undefined for a zero-norm vector")
            sims.append(float(a @ b) / (na * nb))
    return float(np.mean(sims))


# --- model file persistence ------------------------------------------------

def save_model(model: ScenarioWeights, path: str | Path, tool_version: str) -> None:
    """Persist a ScenarioWeights model as structured text (JSON)."""
    payload = {
        "kind": "detectability-model",
        "tool_version": tool_version,
        "taxonomy_version": model.taxonomy_version,
        "scenario": model.scenario,
        "feature_weights": model.feature_weights.as_dict(),
        "subcategory_weights": model.subcategory_weights.as_dict(),
        "provenance": {
            "contributing_responses": list(model.contributing_responses),
            "mean_cr_per_response": model.mean_cr_per_response,
            "cr_threshold": model.cr_threshold,
        },
    }
    # keys stay in taxonomy order so load_model round-trips label order
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ScenarioWeights:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        feat = raw["feature_weights"]
        sub = raw["subcategory_weights"]
        prov = raw.get("provenance", {})
        return ScenarioWeights(
            scenario=raw["scenario"],
            feature_weights=WeightVector(tuple(feat), np.array([feat[k] for k in feat])),
            subcategory_weights=WeightVector(tuple(sub), np.array([sub[k] for k in sub])),
            contributing_responses=tuple(prov.get("contributing_responses", ())),
            mean_cr_per_response=dict(prov.get("mean_cr_per_response", {})),
            cr_threshold=prov.get("cr_threshold"),
            taxonomy_version=raw.get("taxonomy_version", ""),
        )
    except KeyError as exc:
        raise InputError(f"model file {path} missing key {exc.args[0]!r}") from None
