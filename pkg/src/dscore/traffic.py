"""Flow ingestion, dynamic feature extraction and predictability KPIs.

Flow file schema (CSV, UTF-8, header row)::

    start_time,duration_s,src_ip,dst_ip,src_port,dst_port,protocol,packets,bytes

``start_time`` is ISO-8601 UTC (microsecond precision), ``protocol`` is a
number (6/17) or TCP/UDP. Direction is assigned against the device IP:
outbound iff the source address is the device. Sessions are identified
with flow records one-to-one; no stitching is attempted.

Static/declared feature values arrive via a JSON profile file keyed by
feature code.
"""

from __future__ import annotations

import csv
import json
import statistics
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .errors import ConflictError, InputError, ParseError
from .taxonomy import Taxonomy

INBOUND = "inbound"
OUTBOUND = "outbound"

KPI_NAMES = (
    "flow_incoming_packets",
    "hourly_flows",
    "hourly_unique_dst_ips",
    "hourly_unique_dst_ports",
)

_PROTOCOL_NUMBERS = {"6": "TCP", "17": "UDP"}


@dataclass(frozen=True)
class FlowRecord:
    """One directional network flow."""

    start_time: datetime
    duration: float
    direction: str
    peer_ip: str
    device_port: int
    peer_port: int
    protocol: str  # TCP | UDP | other
    packets: int
    bytes: int

    def __post_init__(self):
        if self.packets < 1:
            raise InputError(f"flow has {self.packets} packets; need >= 1")
        if self.bytes < self.packets:
            raise InputError(
                f"flow has {self.bytes} bytes for {self.packets} packets; "
                "each packet is at least 1 byte"
            )
        if self.duration < 0:
            raise InputError(f"negative flow duration {self.duration}")


@dataclass(frozen=True)
class KpiSeries:
    kpi: str
    values: tuple[float, ...]
    device: str = ""


@dataclass(frozen=True)
class DeviceProfile:
    """Raw feature values for one IoT model (identity tuple
    type/manufacturer/model/firmware encoded in model_id)."""

    model_id: str
    static_values: dict[str, float]
    dynamic_values: dict[str, float]
    capture_window: tuple[datetime, datetime] | None = None
    missing: dict[str, str] = field(default_factory=dict)
    taxonomy_version: str = ""

    def all_values(self) -> dict[str, float]:
        return {**self.static_values, **self.dynamic_values}


@dataclass(frozen=True)
class ExtractionConfig:
    night_start_hour: int = 0
    night_end_hour: int = 6  # night = [start, end), device-local
    local_utc_offset_hours: float = 0.0
    encrypted_ports: frozenset[int] = frozenset({443, 8443})
    wellknown_port_max: int = 1024
    wellknown_fraction_threshold: float = 0.99
    ccom_min_span_hours: float = 24.0


@dataclass(frozen=True)
class ExtractionResult:
    """Extracted dynamic feature values plus per-feature reasons for
    anything that could not be computed (never imputed as 0)."""

    values: dict[str, float]
    missing: dict[str, str]


def _parse_timestamp(text: str) -> datetime:
    ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_protocol(text: str) -> str:
    token = text.strip()
    if token.upper() in ("TCP", "UDP"):
        return token.upper()
    if token in _PROTOCOL_NUMBERS:
        return _PROTOCOL_NUMBERS[token]
    return "other"


def load_flows(source, device_ip: str) -> list[FlowRecord]:
    """Read a flow CSV, assigning direction relative to ``device_ip``.

    Records where neither endpoint matches the device are skipped; a
    warning reports how many. Malformed rows raise ParseError with the
    line number.
    """
    if hasattr(source, "read"):
        return _load_flows(source, device_ip)
    with open(source, encoding="utf-8", newline="") as fh:
        return _load_flows(fh, device_ip)


def _load_flows(fh, device_ip: str) -> list[FlowRecord]:
    reader = csv.DictReader(fh)
    required = {
        "start_time", "duration_s", "src_ip", "dst_ip",
        "src_port", "dst_port", "protocol", "packets", "bytes",
    }
    if reader.fieldnames is None:
        return []
    if not required.issubset(reader.fieldnames):
        missing = sorted(required - set(reader.fieldnames))
        raise ParseError(f"flow file header is missing columns: {', '.join(missing)}")

    flows: list[FlowRecord] = []
    skipped = 0
    for line, row in enumerate(reader, start=2):
        try:
            src, dst = row["src_ip"].strip(), row["dst_ip"].strip()
            if src == device_ip:
                direction = OUTBOUND
                peer_ip = dst
                device_port, peer_port = int(row["src_port"]), int(row["dst_port"])
            elif dst == device_ip:
                direction = INBOUND
                peer_ip = src
                device_port, peer_port = int(row["dst_port"]), int(row["src_port"])
            else:
                skipped += 1
                continue
            flows.append(
                FlowRecord(
                    start_time=_parse_timestamp(row["start_time"]),
                    duration=float(row["duration_s"]),
                    direction=direction,
                    peer_ip=peer_ip,
                    device_port=device_port,
                    peer_port=peer_port,
                    protocol=_parse_protocol(row["protocol"]),
                    packets=int(row["packets"]),
                    bytes=int(row["bytes"]),
                )
            )
        except (ValueError, InputError, KeyError) as exc:
            raise ParseError(f"flow file line {line}: {exc}") from None
    if skipped:
        warnings.warn(
            f"skipped {skipped} flow record(s) not involving device {device_ip}",
            stacklevel=3,
        )
    return flows


def _hour_bucket(ts: datetime) -> datetime:
    return ts.replace(minute=0, second=0, microsecond=0)


def _hour_range(flows: list[FlowRecord]) -> list[datetime]:
    first = _hour_bucket(min(f.start_time for f in flows))
    last = _hour_bucket(max(f.start_time for f in flows))
    hours = []
    cur = first
    while cur <= last:
        hours.append(cur)
        cur += timedelta(hours=1)
    return hours


def _hourly_unique(flows: list[FlowRecord], hours: list[datetime], key) -> list[int]:
    per_hour: dict[datetime, set] = {h: set() for h in hours}
    for f in flows:
        per_hour[_hour_bucket(f.start_time)].add(key(f))
    return [len(per_hour[h]) for h in hours]


def _weighted_size_std(flows: list[FlowRecord]) -> float:
    sizes = np.array([f.bytes / f.packets for f in flows])
    weights = np.array([f.packets for f in flows], dtype=float)
    mean = float(np.average(sizes, weights=weights))
    var = float(np.average((sizes - mean) ** 2, weights=weights))
    return float(np.sqrt(var))


def extract_dynamic_features(
    flows: list[FlowRecord], config: ExtractionConfig | None = None
) -> ExtractionResult:
    """Compute the traffic-derived feature values from a flow list.

    Per direction (I = inbound, O = outbound):

    * IATI/IATO -- median gap in seconds between consecutive session starts
    * PCKI/PCKO -- median packets per session
    * PCSI/PCSO -- total bytes / session count
    * PCVI/PCVO -- packet-weighted standard deviation of per-flow mean
      packet size (flow-level data carries no per-packet sizes, so the
      per-flow mean is the stated approximation)

    plus ENCI/ENCO (share of packets on the configured encrypted ports),
    UDPI/UDPO (share of UDP packets), DSIP/DSPR/SRIP (hourly median of
    unique outbound peer IPs / outbound peer ports / inbound peer IPs),
    WLPR (1 when at least 99% of outbound packets target well-known
    ports) and CCOM (night-time mean hourly packets over day-time peak
    hourly packets, clamped to [0, 1]; requires >= 24 h of flows).

    Features that cannot be computed are reported in ``missing`` with a
    reason instead of a zero. Results do not depend on input order.
    """
    cfg = config or ExtractionConfig()
    if not flows:
        raise InputError("no flows to extract features from")

    ordered = sorted(flows, key=lambda f: f.start_time)
    outbound = [f for f in ordered if f.direction == OUTBOUND]
    inbound = [f for f in ordered if f.direction == INBOUND]
    hours = _hour_range(ordered)

    values: dict[str, float] = {}
    missing: dict[str, str] = {}

    def per_direction(tag: str, dir_flows: list[FlowRecord]) -> None:
        suffix = "I" if tag == INBOUND else "O"
        if not dir_flows:
            for code in (f"IAT{suffix}", f"PCK{suffix}", f"PCS{suffix}",
                         f"PCV{suffix}", f"ENC{suffix}", f"UDP{suffix}"):
                missing[code] = f"no {tag} flows"
            return
        if len(dir_flows) >= 2:
            gaps = [
                (b.start_time - a.start_time).total_seconds()
                for a, b in zip(dir_flows, dir_flows[1:])
            ]
            values[f"IAT{suffix}"] = float(statistics.median(gaps))
        else:
            missing[f"IAT{suffix}"] = f"fewer than 2 {tag} flows"
        values[f"PCK{suffix}"] = float(statistics.median(f.packets for f in dir_flows))
        values[f"PCS{suffix}"] = sum(f.bytes for f in dir_flows) / len(dir_flows)
        values[f"PCV{suffix}"] = _weighted_size_std(dir_flows)
        total_packets = sum(f.packets for f in dir_flows)
        values[f"ENC{suffix}"] = (
            sum(f.packets for f in dir_flows if f.peer_port in cfg.encrypted_ports)
            / total_packets
        )
        values[f"UDP{suffix}"] = (
            sum(f.packets for f in dir_flows if f.protocol == "UDP") / total_packets
        )

    per_direction(INBOUND, inbound)
    per_direction(OUTBOUND, outbound)

    if outbound:
        values["DSIP"] = float(
            statistics.median(_hourly_unique(outbound, hours, lambda f: f.peer_ip))
        )
        values["DSPR"] = float(
            statistics.median(_hourly_unique(outbound, hours, lambda f: f.peer_port))
        )
        out_packets = sum(f.packets for f in outbound)
        wellknown = sum(
            f.packets for f in outbound if f.peer_port <= cfg.wellknown_port_max
        )
        values["WLPR"] = float(
            wellknown / out_packets >= cfg.wellknown_fraction_threshold
        )
    else:
        for code in ("DSIP", "DSPR", "WLPR"):
            missing[code] = "no outbound flows"

    if inbound:
        values["SRIP"] = float(
            statistics.median(_hourly_unique(inbound, hours, lambda f: f.peer_ip))
        )
    else:
        missing["SRIP"] = "no inbound flows"

    span_hours = (
        ordered[-1].start_time - ordered[0].start_time
    ).total_seconds() / 3600.0
    if span_hours < cfg.ccom_min_span_hours:
        missing["CCOM"] = (
            f"flows span {span_hours:.1f} h; CCOM needs >= {cfg.ccom_min_span_hours:.0f} h"
        )
    else:
        packets_per_hour = {h: 0 for h in hours}
        for f in ordered:
            packets_per_hour[_hour_bucket(f.start_time)] += f.packets
        night, day = [], []
        for h, count in packets_per_hour.items():
            local_hour = (h.hour + cfg.local_utc_offset_hours) % 24
            if cfg.night_start_hour <= local_hour < cfg.night_end_hour:
                night.append(count)
            else:
                day.append(count)
        if not night:
            missing["CCOM"] = "capture window contains no night-time hours"
        elif not day or max(day) == 0:
            missing["CCOM"] = "no day-time packets to normalize against"
        else:
            values["CCOM"] = min(1.0, max(0.0, float(np.mean(night)) / max(day)))

    return ExtractionResult(values=values, missing=missing)


def compute_kpis(flows: list[FlowRecord], device: str = "") -> list[KpiSeries]:
    """The four predictability KPI series for one device.

    ``flow_incoming_packets`` lists per-inbound-flow packet counts in
    arrival order (omitted when there is no inbound traffic); the hourly
    KPIs cover every wall-clock hour of the capture window, counting 0
    for hours without flows.
    """
    if not flows:
        raise InputError("no flows to compute KPIs from")
    ordered = sorted(flows, key=lambda f: f.start_time)
    outbound = [f for f in ordered if f.direction == OUTBOUND]
    inbound = [f for f in ordered if f.direction == INBOUND]
    hours = _hour_range(ordered)

    series: list[KpiSeries] = []
    if inbound:
        series.append(
            KpiSeries(
                kpi="flow_incoming_packets",
                values=tuple(float(f.packets) for f in inbound),
                device=device,
            )
        )
    per_hour_flows = {h: 0 for h in hours}
    for f in outbound:
        per_hour_flows[_hour_bucket(f.start_time)] += 1
    series.append(
        KpiSeries(
            kpi="hourly_flows",
            values=tuple(float(per_hour_flows[h]) for h in hours),
            device=device,
        )
    )
    series.append(
        KpiSeries(
            kpi="hourly_unique_dst_ips",
            values=tuple(float(v) for v in _hourly_unique(outbound, hours, lambda f: f.peer_ip)),
            device=device,
        )
    )
    series.append(
        KpiSeries(
            kpi="hourly_unique_dst_ports",
            values=tuple(float(v) for v in _hourly_unique(outbound, hours, lambda f: f.peer_port)),
            device=device,
        )
    )
    return series


# --- static profile ingestion ------------------------------------------------

def load_static_profile(path: str | Path, taxonomy: Taxonomy) -> tuple[str, dict[str, float]]:
    """Read a JSON profile of static/declared feature values.

    Traffic-derived features may not be declared here; supplying one is a
    conflict (they come from flow extraction only).
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        model_id = raw["model_id"]
        entries = raw["values"]
    except KeyError as exc:
        raise InputError(f"static profile {path} missing key {exc.args[0]!r}") from None

    values: dict[str, float] = {}
    for code, value in entries.items():
        feat = taxonomy.feature(code)  # raises InputError on unknown codes
        if feat.source == "dynamic":
            raise ConflictError(
                f"static profile supplies {code!r}, which is extracted from traffic"
            )
        v = float(value)
        if v < feat.x_min:
            raise InputError(
                f"value {v} for {code!r} is below the expected minimum {feat.x_min}"
            )
        values[code] = v
    return str(model_id), values


def build_profile(
    model_id: str,
    static_values: dict[str, float],
    extraction: ExtractionResult,
    taxonomy: Taxonomy,
    capture_window: tuple[datetime, datetime] | None = None,
) -> DeviceProfile:
    """Merge declared values with extracted dynamics into a DeviceProfile."""
    overlap = set(static_values) & set(extraction.values)
    if overlap:
        raise ConflictError(f"features supplied twice: {sorted(overlap)}")
    known = set(static_values) | set(extraction.values)
    missing = dict(extraction.missing)
    for feat in taxonomy.features():
        if feat.code not in known and feat.code not in missing:
            missing[feat.code] = "not provided"
    return DeviceProfile(
        model_id=model_id,
        static_values=dict(static_values),
        dynamic_values=dict(extraction.values),
        capture_window=capture_window,
        missing=missing,
        taxonomy_version=taxonomy.version,
    )


def capture_window_of(flows: list[FlowRecord]) -> tuple[datetime, datetime] | None:
    if not flows:
        return None
    start = min(f.start_time for f in flows)
    end = max(f.start_time + timedelta(seconds=f.duration) for f in flows)
    return start, end


def save_profile(profile: DeviceProfile, path: str | Path, tool_version: str) -> None:
    window = None
    if profile.capture_window:
        window = [profile.capture_window[0].isoformat(), profile.capture_window[1].isoformat()]
    payload = {
        "kind": "device-profile",
        "tool_version": tool_version,
        "taxonomy_version": profile.taxonomy_version,
        "model_id": profile.model_id,
        "static_values": profile.static_values,
        "dynamic_values": profile.dynamic_values,
        "missing": profile.missing,
        "capture_window": window,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_profile(path: str | Path) -> DeviceProfile:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        window = raw.get("capture_window")
        capture = None
        if window:
            capture = (_parse_timestamp(window[0]), _parse_timestamp(window[1]))
        return DeviceProfile(
            model_id=raw["model_id"],
            static_values={k: float(v) for k, v in raw["static_values"].items()},
            dynamic_values={k: float(v) for k, v in raw["dynamic_values"].items()},
            capture_window=capture,
            missing=dict(raw.get("missing", {})),
            taxonomy_version=raw.get("taxonomy_version", ""),
        )
    except KeyError as exc:
        raise InputError(f"profile file {path} missing key {exc.args[0]!r}") from None
