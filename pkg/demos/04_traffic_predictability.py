"""Is the constrained device's traffic really more predictable?

Generates hourly KPI series for a steady sensor-like device and an
erratic general-purpose one, then runs the predictability toolkit over
them: Hurst exponents per KPI, a between-group ANOVA and Welch t-test,
and a correlation of a static feature against a KPI summary.
"""

from datetime import datetime, timedelta, timezone

import numpy as np

from dscore import anova_oneway, compute_kpis, hurst, pearson, t_test_two_sided
from dscore.errors import DegenerateDataError
from dscore.traffic import KPI_NAMES, FlowRecord, INBOUND, OUTBOUND

rng = np.random.default_rng(23)
T0 = datetime(2023, 3, 6, 0, 0, tzinfo=timezone.utc)


def synth_flows(mean_out_per_hour, peer_pool, hours=24 * 14):
    flows = []
    for h in range(hours):
        for _ in range(rng.poisson(mean_out_per_hour)):
            packets = int(rng.integers(2, 20))
            if peer_pool > 20:  # browsing-style port spread
                peer_port = int(rng.integers(1024, 65535))
            else:
                peer_port = int(rng.choice([443, 123, 53, 8883][:max(2, peer_pool // 3)]))
            flows.append(FlowRecord(
                start_time=T0 + timedelta(hours=h, seconds=float(rng.uniform(0, 3600))),
                duration=1.0, direction=OUTBOUND,
                peer_ip=f"203.0.113.{rng.integers(1, peer_pool + 1)}",
                device_port=49152,
                peer_port=peer_port,
                protocol="TCP", packets=packets, bytes=packets * 120,
            ))
        for _ in range(rng.poisson(2)):
            packets = int(rng.integers(2, 50))
            flows.append(FlowRecord(
                start_time=T0 + timedelta(hours=h, seconds=float(rng.uniform(0, 3600))),
                duration=1.0, direction=INBOUND,
                peer_ip=f"198.51.100.{rng.integers(1, 6)}",
                device_port=443, peer_port=50000,
                protocol="TCP", packets=packets, bytes=packets * 120,
            ))
    return flows


DEVICES = {
    # name: (outbound flows/hour, distinct peers, number of sensors)
    "motion sensor": (3, 2, 1),
    "thermostat": (5, 3, 2),
    "smart speaker": (12, 10, 3),
    "laptop": (40, 60, None),
    "smartphone": (55, 80, None),
}

kpis = {}
for name, (rate, peers, _) in DEVICES.items():
    kpis[name] = {s.kpi: np.array(s.values) for s in
                  compute_kpis(synth_flows(rate, peers), device=name)}

print("Hurst exponent per device and KPI (values far from 0.5 = predictable trend):")
header = f"{'device':14s}" + "".join(f"{k:>28s}" for k in KPI_NAMES)
print(header)
for name in DEVICES:
    row = f"{name:14s}"
    for kpi in KPI_NAMES:
        series = kpis[name].get(kpi)
        if series is None or len(series) < 100:
            row += f"{'n/a':>28s}"
        else:
            try:
                est = hurst(series)
                row += f"{est.h:>22.3f} ({est.classification[:4]})"
            except DegenerateDataError:
                # a perfectly constant series is maximally predictable but
                # has no rescaled-range slope
                row += f"{'constant':>28s}"
    print(row)

# Group comparison: pool the hourly-flows series of constrained devices
# against the general-purpose ones.
iot = np.concatenate([kpis[n]["hourly_flows"] for n in ("motion sensor", "thermostat", "smart speaker")])
non_iot = np.concatenate([kpis[n]["hourly_flows"] for n in ("laptop", "smartphone")])

anova = anova_oneway([iot, non_iot])
welch = t_test_two_sided(iot, non_iot)
print(f"\nhourly flows, constrained vs general-purpose:")
print(f"  ANOVA: F={anova.statistic:.1f}, p={anova.p_value:.3g}")
lo, hi = welch.ci_95
print(f"  Welch t-test: t={welch.statistic:.2f}, p={welch.p_value:.3g}, "
      f"95% CI of mean difference = ({lo:.2f}, {hi:.2f}) flows/hour")

# Static complexity vs dynamic behavior: more sensors, more hourly flows?
sensor_counts, flow_means = [], []
for name, (_, _, sensors) in DEVICES.items():
    if sensors is not None:
        sensor_counts.append(sensors)
        flow_means.append(float(np.mean(kpis[name]["hourly_flows"])))
r = pearson(sensor_counts, flow_means)
print(f"\ncorrelation of sensor count vs mean hourly flows "
      f"(constrained devices): r={r:.3f}")
