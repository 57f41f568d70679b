"""Expert-weighted detectability scoring for IoT attack scenarios.

The toolkit derives per-scenario feature weights from expert pairwise
comparisons (analytic hierarchy process), extracts static and dynamic
device features, and combines the two into a detectability score and
letter label. A statistics suite (Hurst exponent, ANOVA, t-tests,
Pearson correlation) covers traffic-predictability analysis.
"""

__version__ = "0.1.0"

from .ahp import (
    ComparisonMatrix,
    ConsistencyReport,
    ResponseWeights,
    ScenarioWeights,
    WeightVector,
    aggregate,
    agreement,
    geometric_mean_weights,
    principal_weights,
    response_weights,
    to_matrix,
)
from .responses import (
    CompletedResponse,
    ExpertResponse,
    complete,
    filtering_stats,
    parse_responses,
)
from .scoring import (
    FeatureNorm,
    MaximinEntry,
    ScenarioSpec,
    ScoreCard,
    alpha,
    d_score,
    default_scenarios,
    label,
    load_scenarios,
    maximin_rank,
    normalization_params,
    normalize,
)
from .stats import (
    HurstEstimate,
    TestResult,
    anova_oneway,
    hurst,
    incomplete_beta,
    pearson,
    t_test_two_sided,
)
from .taxonomy import (
    Taxonomy,
    default_taxonomy,
    load_taxonomy,
    pairwise_count,
    save_taxonomy,
    validate,
)
from .traffic import (
    DeviceProfile,
    ExtractionConfig,
    ExtractionResult,
    FlowRecord,
    KpiSeries,
    compute_kpis,
    extract_dynamic_features,
    load_flows,
)
