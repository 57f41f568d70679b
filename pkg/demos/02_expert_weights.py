"""From questionnaire responses to a detectability model.

Synthesizes a small cohort of expert responses for one attack scenario,
fills in the judgments skipped during preliminary filtering, runs the
hierarchical pairwise-comparison analysis per response, and averages the
surviving responses into one weight model. One deliberately sloppy
respondent shows the consistency-ratio filter doing its job.
"""

import numpy as np

from dscore import (
    aggregate,
    agreement,
    complete,
    default_taxonomy,
    response_weights,
)
from dscore.responses import ExpertResponse

tax = default_taxonomy()
rng = np.random.default_rng(7)

SCENARIO = "ddos_flooding"


def judged_pairs(codes, latent):
    """Pairwise judgments from one expert's latent importance scores.

    The questionnaire scale runs -5..+5: negative favors the left element
    of the (canonically ordered) pair, positive the right.
    """
    out = {}
    for i, a in enumerate(codes):
        for b in codes[i + 1:]:
            out[(a, b)] = int(np.clip(round(latent[b] - latent[a]), -5, 5))
    return out


def synthetic_expert(rid, noise=0.6, chaotic=False):
    """One synthetic respondent. ``chaotic`` produces near-random
    judgments, i.e. an inconsistent expert."""
    sub_codes = list(tax.subcategory_codes())
    if chaotic:
        sub_j = {}
        for i, a in enumerate(sub_codes):
            for b in sub_codes[i + 1:]:
                sub_j[(a, b)] = int(rng.integers(-5, 6))
        feat_j = {}
        for sub in tax.subcategories():
            codes = [f.code for f in sub.features]
            for i, a in enumerate(codes):
                for b in codes[i + 1:]:
                    feat_j[(a, b)] = int(rng.integers(-5, 6))
    else:
        # a shared ground-truth opinion (network behavior matters most),
        # perturbed per expert
        base = {"SNA": 0.5, "RSR": 0.8, "FNC": 1.8, "INT": 0.6,
                "INB": 2.8, "OUT": 3.6, "SRD": 3.2}
        latent = {k: v + rng.normal(0, noise) for k, v in base.items()}
        sub_j = judged_pairs(sub_codes, latent)
        feat_j = {}
        for sub in tax.subcategories():
            codes = [f.code for f in sub.features]
            feat_latent = {c: rng.uniform(0, 3) for c in codes}
            feat_j.update(judged_pairs(codes, feat_latent))
    return ExpertResponse(
        response_id=rid,
        scenario=SCENARIO,
        kept_categories=frozenset(tax.category_codes()),
        kept_subcategories=frozenset(tax.subcategory_codes()),
        subcategory_judgments=sub_j,
        feature_judgments=feat_j,
    )


experts = [synthetic_expert(f"expert-{i:02d}") for i in range(6)]
experts.append(synthetic_expert("expert-06-chaotic", chaotic=True))

# complete() is a no-op here on judgments (everything was kept and judged)
# but still canonicalizes the bookkeeping; with real responses it fills the
# pairs skipped during preliminary filtering.
fragments = [response_weights(complete(r, tax), tax) for r in experts]

print("per-response consistency (mean CR over the 7 feature matrices):")
for frag in fragments:
    marker = "  <- above the 0.1 convention" if frag.mean_cr > 0.1 else ""
    print(f"  {frag.response_id}: {frag.mean_cr:.4f}{marker}")

model = aggregate(fragments, cr_threshold=0.1, taxonomy_version=tax.version)
print(f"\nretained {len(model.contributing_responses)} of {len(fragments)} responses")

print("\nsub-category weights (averaged):")
for code, w in model.subcategory_weights.as_dict().items():
    print(f"  {code}: {w:.4f}")

top = sorted(model.feature_weights.as_dict().items(), key=lambda kv: -kv[1])[:8]
print("\ntop feature weights:")
for code, w in top:
    print(f"  {code}: {w:.4f}")

retained = [f for f in fragments if f.response_id in model.contributing_responses]
print(f"\ninter-expert agreement (mean pairwise cosine similarity):")
print(f"  sub-category vectors: {agreement([f.subcategory_weights for f in retained]):.4f}")
print(f"  feature vectors:      {agreement([f.feature_weights for f in retained]):.4f}")
