"""Feature normalization, detectability scores, labels, maximin ranking.

Normalization squashes a raw feature value into [0, 1] with a tanh whose
steepness alpha is derived from the feature's expected range:

    alpha = 1 / (beta * 10**(log10(x_max) - 1))

and the direction delta decides whether larger raw values push the score
up (+1) or down (-1):

    x' = tanh(alpha * x)          for delta = +1
    x' = 1 + tanh(-alpha * x)     for delta = -1

The detectability score is the weight-renormalized sum of normalized
values over the features actually present in a profile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .ahp import ScenarioWeights
from .errors import CoverageError, InputError, InsufficientProfileError, VersionMismatchError
from .taxonomy import Taxonomy
from .traffic import DeviceProfile

DEFAULT_BETA = 5.0
DEFAULT_BINS = 7
MIN_PRESENT_WEIGHT_MASS = 0.5


def alpha(x_max: float, beta: float) -> float:
    """Steepness coefficient for a feature with expected maximum x_max."""
    if x_max <= 0 or beta <= 0:
        raise ValueError(f"x_max and beta must be positive, got ({x_max}, {beta})")
    return 1.0 / (beta * 10.0 ** (math.log10(x_max) - 1.0))


def normalize(x: float, alpha_value: float, delta: int) -> float:
    """Squash a raw value into [0, 1] along the configured direction."""
    if x < 0:
        raise ValueError(f"raw feature values must be >= 0, got {x}")
    if delta not in (-1, 1):
        raise ValueError(f"delta must be -1 or +1, got {delta}")
    if delta == 1:
        return math.tanh(alpha_value * delta * x)
    return 1.0 + math.tanh(alpha_value * delta * x)


@dataclass(frozen=True)
class FeatureNorm:
    """Resolved normalization parameters for one (feature, scenario)."""

    alpha: float
    beta: float
    delta: int
    x_min: float
    x_max: float


@dataclass(frozen=True)
class ScenarioSpec:
    """One scenario's configuration block: per-feature direction, beta per
    range class, and the label bin count."""

    code: str
    name: str
    description: str
    bins: int
    beta_by_class: dict[float, float]
    delta: dict[str, int]


@dataclass(frozen=True)
class ScoreCard:
    scenario: str
    model_id: str
    normalized_values: dict[str, float]
    d_score: float
    label: str
    missing_features: dict[str, str]

    def summary_line(self) -> str:
        return f"{self.model_id} {self.scenario} {self.d_score:.6f} {self.label}"


def load_scenarios(path: str | Path) -> dict[str, ScenarioSpec]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return _scenarios_from_dict(raw)


def _scenarios_from_dict(raw: dict) -> dict[str, ScenarioSpec]:
    out: dict[str, ScenarioSpec] = {}
    try:
        for block in raw["scenarios"]:
            code = block["code"]
            beta_by_class = {
                float(k): float(v) for k, v in block.get("beta", {}).items()
            }
            out[code] = ScenarioSpec(
                code=code,
                name=block.get("name", code),
                description=block.get("description", ""),
                bins=int(block.get("bins", DEFAULT_BINS)),
                beta_by_class=beta_by_class,
                delta={k: int(v) for k, v in block["delta"].items()},
            )
    except KeyError as exc:
        raise InputError(f"scenario config missing key {exc.args[0]!r}") from None
    if not out:
        raise InputError("scenario config defines no scenarios")
    return out


@lru_cache(maxsize=1)
def default_scenarios() -> dict[str, ScenarioSpec]:
    raw = json.loads(
        resources.files("dscore.data").joinpath("scenarios.json").read_text("utf-8")
    )
    return _scenarios_from_dict(raw)


def normalization_params(taxonomy: Taxonomy, spec: ScenarioSpec) -> dict[str, FeatureNorm]:
    """Resolve per-feature normalization parameters for one scenario.

    Directions are mandatory for every feature; a nonzero x_min is
    rejected because the squashing assumes values start at 0.
    """
    params: dict[str, FeatureNorm] = {}
    for feat in taxonomy.features():
        if feat.x_min != 0:
            raise InputError(
                f"feature {feat.code!r} has x_min={feat.x_min}; normalization "
                "requires x_min = 0 (shift the raw values in extraction instead)"
            )
        if feat.code not in spec.delta:
            raise InputError(
                f"scenario {spec.code!r} does not configure a direction (delta) "
                f"for feature {feat.code!r}"
            )
        delta = spec.delta[feat.code]
        if delta not in (-1, 1):
            raise InputError(
                f"scenario {spec.code!r} has delta={delta} for {feat.code!r}; must be -1 or +1"
            )
        beta = spec.beta_by_class.get(feat.x_max, DEFAULT_BETA)
        params[feat.code] = FeatureNorm(
            alpha=alpha(feat.x_max, beta),
            beta=beta,
            delta=delta,
            x_min=feat.x_min,
            x_max=feat.x_max,
        )
    return params


def d_score(
    weights: ScenarioWeights,
    profile: DeviceProfile,
    params: dict[str, FeatureNorm],
    bins: int = DEFAULT_BINS,
    min_weight_mass: float = MIN_PRESENT_WEIGHT_MASS,
) -> ScoreCard:
    """Score one device profile against one scenario's weights.

    Missing features never contribute; the surviving weights are
    renormalized. When the present features carry less than
    ``min_weight_mass`` of the total weight the score is refused, since a
    mostly-imputed score would be noise.
    """
    if (
        weights.taxonomy_version
        and profile.taxonomy_version
        and weights.taxonomy_version != profile.taxonomy_version
    ):
        raise VersionMismatchError(
            f"model taxonomy {weights.taxonomy_version!r} != "
            f"profile taxonomy {profile.taxonomy_version!r}"
        )

    available = profile.all_values()
    weight_map = weights.feature_weights.as_dict()
    present = [code for code in weight_map if code in available]
    absent = {
        code: profile.missing.get(code, "not provided")
        for code in weight_map
        if code not in available
    }
    present_mass = sum(weight_map[code] for code in present)
    if present_mass < min_weight_mass:
        raise InsufficientProfileError(
            f"only {present_mass:.3f} of the weight mass is on present features "
            f"(floor {min_weight_mass}); missing: {sorted(absent)}",
            missing=sorted(absent),
        )

    normalized: dict[str, float] = {}
    total = 0.0
    for code in present:
        p = params.get(code)
        if p is None:
            raise InputError(f"no normalization parameters for feature {code!r}")
        xprime = normalize(available[code], p.alpha, p.delta)
        normalized[code] = xprime
        total += (weight_map[code] / present_mass) * xprime

    return ScoreCard(
        scenario=weights.scenario,
        model_id=profile.model_id,
        normalized_values=normalized,
        d_score=total,
        label=label(total, bins),
        missing_features=absent,
    )


def label(d: float, bins: int = DEFAULT_BINS) -> str:
    """Letter grade from equal-width binning, 'A' on top.

    A boundary value belongs to the higher-detectability bin, so e.g.
    with 7 bins a score of exactly 3/7 gets 'D', not 'E'.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"score must be in [0, 1], got {d}")
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    for k in range(bins - 1, 0, -1):
        if d >= k / bins:
            return chr(ord("A") + (bins - 1 - k))
    return chr(ord("A") + (bins - 1))


@dataclass(frozen=True)
class MaximinEntry:
    model_id: str
    min_score: float
    mean_score: float
    scores: dict[str, float]


def maximin_rank(scores: dict[tuple[str, str], float]) -> list[MaximinEntry]:
    """Rank models by their worst-case score across scenarios.

    ``scores`` maps (model_id, scenario) to a detectability score; every
    model must cover the same scenario set. Ties on the minimum break by
    mean, then model_id.
    """
    if not scores:
        raise InputError("no scores to rank")
    per_model: dict[str, dict[str, float]] = {}
    for (model, scenario), value in scores.items():
        per_model.setdefault(model, {})[scenario] = value

    scenario_sets = {model: frozenset(s) for model, s in per_model.items()}
    reference = next(iter(scenario_sets.values()))
    ragged = {m for m, s in scenario_sets.items() if s != reference}
    if ragged:
        raise CoverageError(
            f"models {sorted(ragged)} are not scored on the same scenario set "
            f"as the rest"
        )

    entries = [
        MaximinEntry(
            model_id=model,
            min_score=min(vals.values()),
            mean_score=sum(vals.values()) / len(vals),
            scores=dict(sorted(vals.items())),
        )
        for model, vals in per_model.items()
    ]
    entries.sort(key=lambda e: (-e.min_score, -e.mean_score, e.model_id))
    return entries
