"""Hierarchical feature taxonomy that every other module keys against.

The taxonomy is data, not code: it ships as a versioned JSON config so
features can be added or redefined without touching the package. The
default config describes 3 categories, 7 sub-categories and 30 features.

Structure is immutable after load and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import InputError

VALID_UNITS = frozenset(
    {"count", "count/hour", "MHz", "MB", "seconds", "bytes", "percent", "binary"}
)
VALID_SOURCES = frozenset({"static", "dynamic", "declared"})


def pairwise_count(n: int) -> int:
    """Number of pairwise comparisons among n elements: n*(n-1)/2."""
    if n < 1:
        raise ValueError(f"element count must be >= 1, got {n}")
    return n * (n - 1) // 2


@dataclass(frozen=True)
class FeatureDef:
    """One leaf feature: identifier, display name, unit, data source and
    the expected value range driving normalization."""

    code: str
    name: str
    unit: str
    source: str
    x_min: float
    x_max: float
    range_note: str = ""


@dataclass(frozen=True)
class SubCategory:
    code: str
    name: str
    features: tuple[FeatureDef, ...]


@dataclass(frozen=True)
class Category:
    code: str
    name: str
    sub_categories: tuple[SubCategory, ...]


@dataclass(frozen=True)
class PairCounts:
    """Comparison-pair arithmetic for one taxonomy.

    ``subcategories`` counts the single 7-way matrix actually used for
    weighting; ``subcategories_within_category`` counts pairs confined to
    one category, which is how the historical questionnaire-size total of
    65 (3 + 5 + 57 for the default taxonomy) was arrived at.
    """

    categories: int
    subcategories: int
    subcategories_within_category: int
    features_total: int
    features_per_subcategory: tuple[int, ...]


@dataclass(frozen=True)
class Taxonomy:
    categories: tuple[Category, ...]
    version: str
    # lookup tables derived once in __post_init__, keyed by code
    _features: dict = field(default_factory=dict, repr=False, compare=False)
    _subcategories: dict = field(default_factory=dict, repr=False, compare=False)
    _feature_subcat: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for cat in self.categories:
            for sub in cat.sub_categories:
                self._subcategories[sub.code] = sub
                for feat in sub.features:
                    self._features[feat.code] = feat
                    self._feature_subcat[feat.code] = sub.code

    def subcategories(self) -> tuple[SubCategory, ...]:
        return tuple(s for c in self.categories for s in c.sub_categories)

    def features(self) -> tuple[FeatureDef, ...]:
        return tuple(f for s in self.subcategories() for f in s.features)

    def category_codes(self) -> tuple[str, ...]:
        return tuple(c.code for c in self.categories)

    def subcategory_codes(self) -> tuple[str, ...]:
        return tuple(s.code for s in self.subcategories())

    def feature_codes(self) -> tuple[str, ...]:
        return tuple(f.code for f in self.features())

    def feature(self, code: str) -> FeatureDef:
        try:
            return self._features[code]
        except KeyError:
            raise InputError(f"unknown feature code {code!r}") from None

    def subcategory(self, code: str) -> SubCategory:
        try:
            return self._subcategories[code]
        except KeyError:
            raise InputError(f"unknown sub-category code {code!r}") from None

    def subcategory_of_feature(self, code: str) -> str:
        try:
            return self._feature_subcat[code]
        except KeyError:
            raise InputError(f"unknown feature code {code!r}") from None

    def has_feature(self, code: str) -> bool:
        return code in self._features

    def count_features(self) -> int:
        return len(self.features())

    def pair_counts(self) -> PairCounts:
        per_sub = tuple(len(s.features) for s in self.subcategories())
        within_cat = sum(
            pairwise_count(len(c.sub_categories)) for c in self.categories
        )
        return PairCounts(
            categories=pairwise_count(len(self.categories)),
            subcategories=pairwise_count(len(self.subcategories())),
            subcategories_within_category=within_cat,
            features_total=sum(pairwise_count(k) for k in per_sub),
            features_per_subcategory=per_sub,
        )

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "categories": [
                {
                    "code": c.code,
                    "name": c.name,
                    "sub_categories": [
                        {
                            "code": s.code,
                            "name": s.name,
                            "features": [
                                {
                                    "code": f.code,
                                    "name": f.name,
                                    "unit": f.unit,
                                    "source": f.source,
                                    "x_min": f.x_min,
                                    "x_max": f.x_max,
                                    **({"range_note": f.range_note} if f.range_note else {}),
                                }
                                for f in s.features
                            ],
                        }
                        for s in c.sub_categories
                    ],
                }
                for c in self.categories
            ],
        }


def from_dict(raw: dict) -> Taxonomy:
    try:
        categories = tuple(
            Category(
                code=c["code"],
                name=c["name"],
                sub_categories=tuple(
                    SubCategory(
                        code=s["code"],
                        name=s["name"],
                        features=tuple(
                            FeatureDef(
                                code=f["code"],
                                name=f["name"],
                                unit=f["unit"],
                                source=f["source"],
                                x_min=float(f["x_min"]),
                                x_max=float(f["x_max"]),
                                range_note=f.get("range_note", ""),
                            )
                            for f in s["features"]
                        ),
                    )
                    for s in c["sub_categories"]
                ),
            )
            for c in raw["categories"]
        )
        return Taxonomy(categories=categories, version=str(raw["version"]))
    except KeyError as exc:
        raise InputError(f"taxonomy config missing required key {exc.args[0]!r}") from None


def load_taxonomy(path: str | Path) -> Taxonomy:
    """Load a taxonomy from a JSON config file."""
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))


def save_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(taxonomy.to_dict(), indent=2, sort_keys=False) + "\n",
        encoding="utf-8",
    )


@lru_cache(maxsize=1)
def default_taxonomy() -> Taxonomy:
    """The shipped 3-category / 7-sub-category / 30-feature structure."""
    raw = json.loads(
        resources.files("dscore.data").joinpath("taxonomy.json").read_text("utf-8")
    )
    return from_dict(raw)


def validate(taxonomy: Taxonomy) -> list[str]:
    """Check structural invariants; returns one message per violation
    (empty list means the taxonomy is valid). Each message names the
    offending code."""
    violations: list[str] = []

    def check_unique(kind: str, codes: list[str]) -> None:
        seen: set[str] = set()
        for code in codes:
            if code in seen:
                violations.append(f"duplicate {kind} code {code!r}")
            seen.add(code)

    check_unique("category", [c.code for c in taxonomy.categories])
    check_unique("sub-category", [s.code for c in taxonomy.categories for s in c.sub_categories])
    check_unique(
        "feature",
        [f.code for c in taxonomy.categories for s in c.sub_categories for f in s.features],
    )

    if not taxonomy.categories:
        violations.append("taxonomy has no categories")
    for cat in taxonomy.categories:
        if not cat.sub_categories:
            violations.append(f"category {cat.code!r} has no sub-categories")
        for sub in cat.sub_categories:
            if not sub.features:
                violations.append(f"sub-category {sub.code!r} has no features")
            for feat in sub.features:
                if feat.unit not in VALID_UNITS:
                    violations.append(f"feature {feat.code!r} has unknown unit {feat.unit!r}")
                if feat.source not in VALID_SOURCES:
                    violations.append(f"feature {feat.code!r} has unknown source {feat.source!r}")
                if not feat.x_min < feat.x_max:
                    violations.append(
                        f"feature {feat.code!r} has empty range "
                        f"(x_min={feat.x_min}, x_max={feat.x_max})"
                    )
                if feat.unit in ("percent", "binary") and feat.x_max != 1:
                    violations.append(
                        f"feature {feat.code!r} is {feat.unit} but x_max={feat.x_max} (must be 1)"
                    )
    return violations
