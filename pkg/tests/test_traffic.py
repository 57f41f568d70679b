import io
from datetime import timedelta, timezone

import numpy as np
import pytest

from dscore.errors import ConflictError, InputError, ParseError
from dscore.traffic import (
    INBOUND,
    OUTBOUND,
    build_profile,
    capture_window_of,
    compute_kpis,
    extract_dynamic_features,
    load_flows,
    load_profile,
    load_static_profile,
    save_profile,
)

from conftest import T0, flows_csv, make_flow


class TestLoadFlows:
    def test_direction_assignment(self):
        text = flows_csv([
            {"start_time": "2023-03-06T08:00:00Z", "src_ip": "10.0.0.5", "dst_ip": "1.2.3.4"},
            {"start_time": "2023-03-06T08:01:00Z", "src_ip": "1.2.3.4", "dst_ip": "10.0.0.5",
             "src_port": 443, "dst_port": 49152},
        ])
        flows = load_flows(io.StringIO(text), "10.0.0.5")
        assert [f.direction for f in flows] == [OUTBOUND, INBOUND]
        assert flows[0].peer_ip == "1.2.3.4"
        assert flows[1].peer_port == 443
        assert flows[1].device_port == 49152
        assert flows[0].start_time.tzinfo == timezone.utc

    def test_unrelated_record_skipped_with_warning(self):
        text = flows_csv([
            {"start_time": "2023-03-06T08:00:00Z", "src_ip": "10.0.0.5", "dst_ip": "1.2.3.4"},
            {"start_time": "2023-03-06T08:01:00Z", "src_ip": "9.9.9.9", "dst_ip": "8.8.8.8"},
        ])
        with pytest.warns(UserWarning, match="skipped 1"):
            flows = load_flows(io.StringIO(text), "10.0.0.5")
        assert len(flows) == 1

    def test_empty_file(self):
        header = "start_time,duration_s,src_ip,dst_ip,src_port,dst_port,protocol,packets,bytes\n"
        assert load_flows(io.StringIO(header), "10.0.0.5") == []

    def test_malformed_row_names_line(self):
        text = flows_csv([{"start_time": "not-a-time", "src_ip": "10.0.0.5", "dst_ip": "1.2.3.4"}])
        with pytest.raises(ParseError, match="line 2"):
            load_flows(io.StringIO(text), "10.0.0.5")

    def test_protocol_numbers(self):
        text = flows_csv([
            {"start_time": "2023-03-06T08:00:00Z", "src_ip": "10.0.0.5", "dst_ip": "1.2.3.4",
             "protocol": "17"},
            {"start_time": "2023-03-06T08:00:01Z", "src_ip": "10.0.0.5", "dst_ip": "1.2.3.4",
             "protocol": "6"},
            {"start_time": "2023-03-06T08:00:02Z", "src_ip": "10.0.0.5", "dst_ip": "1.2.3.4",
             "protocol": "1"},
        ])
        flows = load_flows(io.StringIO(text), "10.0.0.5")
        assert [f.protocol for f in flows] == ["UDP", "TCP", "other"]

    def test_invariants_enforced(self):
        with pytest.raises(InputError, match="packets"):
            make_flow(packets=0)
        with pytest.raises(InputError, match="bytes"):
            make_flow(packets=10, nbytes=5)


def three_session_flows():
    """Outbound UDP sessions at t, t+10s, t+40s, all to port 443."""
    return [
        make_flow(minutes=0.0, protocol="UDP", peer_port=443, packets=4, nbytes=400),
        make_flow(minutes=10.0 / 60.0, protocol="UDP", peer_port=443, packets=6, nbytes=600),
        make_flow(minutes=40.0 / 60.0, protocol="UDP", peer_port=443, packets=8, nbytes=800),
    ]


class TestExtractDynamicFeatures:
    def test_three_session_fixture(self):
        result = extract_dynamic_features(three_session_flows())
        # gaps are 10 s and 30 s, median 20 s
        assert result.values["IATO"] == 20.0
        assert result.values["UDPO"] == 1.0
        assert result.values["ENCO"] == 1.0
        assert result.values["WLPR"] == 1.0
        assert result.values["PCKO"] == 6.0
        assert result.values["PCSO"] == 600.0
        assert "CCOM" in result.missing  # span is 40 s, far below a day
        assert "IATI" in result.missing  # no inbound flows

    def test_order_invariance(self):
        flows = three_session_flows()
        base = extract_dynamic_features(flows)
        rng = np.random.default_rng(13)
        for _ in range(10):
            shuffled = list(flows)
            rng.shuffle(shuffled)
            assert extract_dynamic_features(shuffled) == base

    def test_non_wellknown_ports_zero_wlpr(self):
        flows = [
            make_flow(minutes=0, peer_port=8080),
            make_flow(minutes=1, peer_port=9000),
        ]
        result = extract_dynamic_features(flows)
        assert result.values["WLPR"] == 0.0
        assert result.values["ENCO"] == 0.0

    def test_wlpr_threshold_tolerates_one_percent(self):
        flows = [make_flow(minutes=i, peer_port=80, packets=100) for i in range(10)]
        flows.append(make_flow(minutes=10, peer_port=9999, packets=1))
        result = extract_dynamic_features(flows)
        # 1000 of 1001 packets on well-known ports: above the 0.99 floor
        assert result.values["WLPR"] == 1.0

    def test_packet_weighted_size_std(self):
        # per-flow mean sizes 10 and 40 bytes with packet weights 3 and 1
        flows = [
            make_flow(minutes=0, packets=3, nbytes=30),
            make_flow(minutes=1, packets=1, nbytes=40),
        ]
        result = extract_dynamic_features(flows)
        mean = (3 * 10 + 1 * 40) / 4
        var = (3 * (10 - mean) ** 2 + 1 * (40 - mean) ** 2) / 4
        assert result.values["PCVO"] == pytest.approx(var**0.5, abs=1e-12)

    def test_hourly_unique_counts(self):
        flows = [
            make_flow(minutes=0, peer_ip="1.1.1.1", peer_port=80),
            make_flow(minutes=5, peer_ip="2.2.2.2", peer_port=443),
            make_flow(minutes=10, peer_ip="2.2.2.2", peer_port=443),
            make_flow(minutes=70, peer_ip="3.3.3.3", peer_port=53),
            make_flow(minutes=70, direction=INBOUND, peer_ip="4.4.4.4"),
        ]
        result = extract_dynamic_features(flows)
        # hour buckets: [2 ips, 1 ip] -> median 1.5; ports likewise
        assert result.values["DSIP"] == 1.5
        assert result.values["DSPR"] == 1.5
        # inbound unique source IPs per hour: [0, 1] -> median 0.5
        assert result.values["SRIP"] == 0.5

    def test_ccom_night_day_ratio(self):
        flows = []
        # two days of traffic: 100 packets at 03:00, 400 at 15:00 (peak)
        for day in range(2):
            flows.append(make_flow(start=T0.replace(hour=3) + timedelta(days=day), packets=100,
                                   nbytes=10_000))
            flows.append(make_flow(start=T0.replace(hour=15) + timedelta(days=day), packets=400,
                                   nbytes=40_000))
        result = extract_dynamic_features(flows)
        # window spans 03:00 day0 .. 15:00 day1 -> night buckets 03,04,05 (d0)
        # and 00..05 (d1): packets [100,0,0, 0,0,0,100,0,0] -> mean 200/9;
        # day-time peak is 400
        assert result.values["CCOM"] == pytest.approx((200 / 9) / 400, abs=1e-12)

    def test_ccom_clamped_to_one(self):
        flows = []
        for day in range(2):
            flows.append(make_flow(start=T0.replace(hour=3) + timedelta(days=day), packets=500,
                                   nbytes=50_000))
            flows.append(make_flow(start=T0.replace(hour=15) + timedelta(days=day), packets=10,
                                   nbytes=1_000))
        result = extract_dynamic_features(flows)
        assert result.values["CCOM"] == 1.0

    def test_empty_flows_rejected(self):
        with pytest.raises(InputError):
            extract_dynamic_features([])

    def test_single_outbound_flow(self):
        result = extract_dynamic_features([make_flow()])
        assert "IATO" in result.missing
        assert result.values["PCVO"] == 0.0


class TestComputeKpis:
    def test_single_inbound_flow(self):
        flows = [make_flow(direction=INBOUND, packets=7)]
        series = {s.kpi: s for s in compute_kpis(flows, device="cam")}
        assert series["flow_incoming_packets"].values == (7.0,)
        assert series["flow_incoming_packets"].device == "cam"

    def test_unique_ips_single_hour(self):
        flows = [
            make_flow(minutes=1, peer_ip="1.1.1.1"),
            make_flow(minutes=2, peer_ip="2.2.2.2"),
            make_flow(minutes=3, peer_ip="3.3.3.3"),
            make_flow(minutes=4, peer_ip="3.3.3.3"),
        ]
        series = {s.kpi: s for s in compute_kpis(flows)}
        assert series["hourly_unique_dst_ips"].values == (3.0,)

    def test_empty_hour_contributes_zero(self):
        flows = [make_flow(minutes=m) for m in range(5)]
        flows.append(make_flow(minutes=70, direction=INBOUND))
        series = {s.kpi: s for s in compute_kpis(flows)}
        assert series["hourly_flows"].values == (5.0, 0.0)
        assert series["hourly_unique_dst_ports"].values == (1.0, 0.0)

    def test_no_inbound_flows_omit_packet_series(self):
        series = {s.kpi for s in compute_kpis([make_flow()])}
        assert "flow_incoming_packets" not in series

    def test_hour_split_recombination(self):
        rng = np.random.default_rng(3)
        flows = [
            make_flow(minutes=float(rng.uniform(0, 240)), peer_ip=f"1.1.1.{rng.integers(1, 9)}")
            for _ in range(60)
        ]
        whole = {s.kpi: s.values for s in compute_kpis(flows)}
        by_hour = {}
        for f in flows:
            by_hour.setdefault(f.start_time.hour, []).append(f)
        recombined = []
        for hour in sorted(by_hour):
            part = {s.kpi: s.values for s in compute_kpis(by_hour[hour])}
            recombined.extend(part["hourly_unique_dst_ips"])
        assert list(whole["hourly_unique_dst_ips"]) == recombined


class TestProfiles:
    def test_static_profile_round_trip(self, tax, tmp_path):
        path = tmp_path / "static.json"
        path.write_text(
            '{"model_id": "webcam/acme/x1/v1", "values": {"NSNS": 5, "BATT": 0, "STOS": 1}}'
        )
        model_id, values = load_static_profile(path, tax)
        assert model_id == "webcam/acme/x1/v1"
        assert values == {"NSNS": 5.0, "BATT": 0.0, "STOS": 1.0}

    def test_static_profile_rejects_dynamic_feature(self, tax, tmp_path):
        path = tmp_path / "static.json"
        path.write_text('{"model_id": "m", "values": {"IATO": 3}}')
        with pytest.raises(ConflictError, match="IATO"):
            load_static_profile(path, tax)

    def test_static_profile_rejects_unknown_code(self, tax, tmp_path):
        path = tmp_path / "static.json"
        path.write_text('{"model_id": "m", "values": {"ZZZZ": 3}}')
        with pytest.raises(InputError, match="ZZZZ"):
            load_static_profile(path, tax)

    def test_build_and_persist_profile(self, tax, tmp_path):
        flows = three_session_flows()
        extraction = extract_dynamic_features(flows)
        profile = build_profile(
            "webcam/acme/x1/v1",
            {"NSNS": 5.0},
            extraction,
            tax,
            capture_window=capture_window_of(flows),
        )
        assert profile.all_values()["NSNS"] == 5.0
        assert profile.all_values()["UDPO"] == 1.0
        assert profile.missing["CCOM"].startswith("flows span")
        assert profile.missing["MEMS"] == "not provided"
        path = tmp_path / "profile.json"
        save_profile(profile, path, tool_version="0.1.0")
        reloaded = load_profile(path)
        assert reloaded.model_id == profile.model_id
        assert reloaded.dynamic_values == profile.dynamic_values
        assert reloaded.capture_window == profile.capture_window
        assert reloaded.taxonomy_version == tax.version
