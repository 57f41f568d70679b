"""Scoring competing devices: flows in, letter grades out.

Builds two synthetic webcams: a chatty one (many endpoints, bursty,
continuously communicating) and a quiet one. The quiet device's traffic
is easier to baseline, so anomalies stand out and its detectability
score should come out higher.
"""

from datetime import datetime, timedelta, timezone

import numpy as np

from dscore import (
    aggregate,
    complete,
    d_score,
    default_scenarios,
    default_taxonomy,
    extract_dynamic_features,
    maximin_rank,
    normalization_params,
    response_weights,
)
from dscore.responses import ExpertResponse
from dscore.traffic import FlowRecord, OUTBOUND, INBOUND, build_profile, capture_window_of

tax = default_taxonomy()
rng = np.random.default_rng(11)
T0 = datetime(2023, 3, 6, 0, 0, tzinfo=timezone.utc)


def synth_flows(chatty: bool, hours: int = 48):
    """Two days of flows; the chatty device talks to more peers, more
    often, with noisier packet sizes, day and night."""
    flows = []
    for h in range(hours):
        is_night = (h % 24) < 6
        n_out = rng.poisson(20 if chatty else 4)
        if is_night and not chatty:
            n_out = rng.poisson(1)
        for _ in range(n_out):
            packets = int(rng.integers(2, 40 if chatty else 8))
            size = int(rng.integers(80, 1400 if chatty else 300))
            flows.append(FlowRecord(
                start_time=T0 + timedelta(hours=h, seconds=float(rng.uniform(0, 3600))),
                duration=float(rng.uniform(0.1, 20)),
                direction=OUTBOUND,
                peer_ip=f"203.0.113.{rng.integers(1, 40 if chatty else 4)}",
                device_port=49152,
                peer_port=int(rng.choice([443, 8883, 123, 5353] if chatty else [443, 123])),
                protocol=str(rng.choice(["TCP", "UDP"])),
                packets=packets,
                bytes=packets * size,
            ))
        for _ in range(rng.poisson(3 if chatty else 1)):
            packets = int(rng.integers(2, 12))
            flows.append(FlowRecord(
                start_time=T0 + timedelta(hours=h, seconds=float(rng.uniform(0, 3600))),
                duration=float(rng.uniform(0.1, 5)),
                direction=INBOUND,
                peer_ip=f"198.51.100.{rng.integers(1, 8)}",
                device_port=443,
                peer_port=int(rng.integers(40000, 65000)),
                protocol="TCP",
                packets=packets,
                bytes=packets * 200,
            ))
    return flows


STATIC = {
    "quiet webcam": {"NSNS": 2, "NACT": 1, "CPUS": 200, "MEMS": 64, "BATT": 0,
                     "STOS": 0, "ADAP": 0, "NUSR": 1, "FINT": 0.2, "DINT": 20,
                     "NUIS": 1, "SRNG": 0, "OPPR": 1},
    "chatty webcam": {"NSNS": 6, "NACT": 2, "CPUS": 900, "MEMS": 512, "BATT": 0,
                      "STOS": 1, "ADAP": 1, "NUSR": 4, "FINT": 3, "DINT": 200,
                      "NUIS": 3, "SRNG": 1, "OPPR": 5},
}

# A quick synthetic expert model (see demos/02 for the full story).
def quick_model(scenario):
    latent_sub = {"SNA": 0.5, "RSR": 0.8, "FNC": 1.8, "INT": 0.6,
                  "INB": 2.8, "OUT": 3.6, "SRD": 3.2}
    sub_j, feat_j = {}, {}
    codes = list(tax.subcategory_codes())
    for i, a in enumerate(codes):
        for b in codes[i + 1:]:
            sub_j[(a, b)] = int(np.clip(round(latent_sub[b] - latent_sub[a]), -5, 5))
    for sub in tax.subcategories():
        fcodes = [f.code for f in sub.features]
        latent = {c: rng.uniform(0, 3) for c in fcodes}
        for i, a in enumerate(fcodes):
            for b in fcodes[i + 1:]:
                feat_j[(a, b)] = int(np.clip(round(latent[b] - latent[a]), -5, 5))
    response = ExpertResponse(
        response_id="synthetic-expert", scenario=scenario,
        kept_categories=frozenset(tax.category_codes()),
        kept_subcategories=frozenset(tax.subcategory_codes()),
        subcategory_judgments=sub_j, feature_judgments=feat_j,
    )
    fragment = response_weights(complete(response, tax), tax)
    return aggregate([fragment], taxonomy_version=tax.version)


scenarios = default_scenarios()
models = {code: quick_model(code) for code in ("ddos_flooding", "bot_scanning")}

profiles = {}
for name, static_values in STATIC.items():
    flows = synth_flows(chatty=(name == "chatty webcam"))
    extraction = extract_dynamic_features(flows)
    profiles[name] = build_profile(name, static_values, extraction, tax,
                                   capture_window=capture_window_of(flows))
    print(f"{name}: {len(flows)} flows, CCOM={extraction.values['CCOM']:.3f}, "
          f"DSIP={extraction.values['DSIP']:.1f}, PCVO={extraction.values['PCVO']:.1f}")

print()
scores = {}
for scenario_code, model in models.items():
    params = normalization_params(tax, scenarios[scenario_code])
    for name, profile in profiles.items():
        card = d_score(model, profile, params)
        scores[(name, scenario_code)] = card.d_score
        print(card.summary_line())

# Worst-case-first procurement view: rank by the minimum score across the
# scenarios of interest.
print("\nmaximin ranking (higher worst-case detectability first):")
for entry in maximin_rank(scores):
    print(f"  {entry.model_id}: min={entry.min_score:.3f} mean={entry.mean_score:.3f}")
