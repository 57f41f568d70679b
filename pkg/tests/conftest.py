"""Shared fixtures: synthetic response files and flow builders."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from dscore import default_taxonomy
from dscore.traffic import FlowRecord, INBOUND, OUTBOUND

HEADER = "response_id,scenario,record_kind,left_code,right_code,value"

T0 = datetime(2023, 3, 6, 8, 0, 0, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def tax():
    return default_taxonomy()


def response_rows(
    rid,
    scenario,
    kept_categories=(),
    kept_subcategories=(),
    subcat_judgments=(),
    feature_judgments=(),
    demographics=(),
):
    """CSV rows (without header) for one synthetic response.

    Judgments are (left, right, value) triples in file order; sign
    convention follows the schema (positive favors the right element).
    """
    rows = []
    for code in kept_categories:
        rows.append(f"{rid},{scenario},keep_category,{code},,1")
    for code in kept_subcategories:
        rows.append(f"{rid},{scenario},keep_subcategory,{code},,1")
    for left, right, value in subcat_judgments:
        rows.append(f"{rid},{scenario},judgment_subcat,{left},{right},{value}")
    for left, right, value in feature_judgments:
        rows.append(f"{rid},{scenario},judgment_feature,{left},{right},{value}")
    for key, value in demographics:
        rows.append(f"{rid},{scenario},demographic,{key},,{value}")
    return rows


def response_csv(*row_groups):
    return "\n".join([HEADER, *(r for group in row_groups for r in group)]) + "\n"


def full_keep_response_rows(rid, scenario, taxonomy, magnitude_for=None):
    """A response keeping everything, with every pair judged.

    ``magnitude_for`` maps a canonical pair to a value; unlisted pairs get 0.
    """
    magnitude_for = magnitude_for or {}
    sub_codes = taxonomy.subcategory_codes()
    subcat_judgments = []
    for i, a in enumerate(sub_codes):
        for b in sub_codes[i + 1 :]:
            subcat_judgments.append((a, b, magnitude_for.get((a, b), 0)))
    feature_judgments = []
    for sub in taxonomy.subcategories():
        codes = [f.code for f in sub.features]
        for i, a in enumerate(codes):
            for b in codes[i + 1 :]:
                feature_judgments.append((a, b, magnitude_for.get((a, b), 0)))
    return response_rows(
        rid,
        scenario,
        kept_categories=taxonomy.category_codes(),
        kept_subcategories=sub_codes,
        subcat_judgments=subcat_judgments,
        feature_judgments=feature_judgments,
    )


def transitive_magnitudes(taxonomy, rng, spread=2.4, include_subcats=True):
    """Judgments derived from latent element scores: transitive, so the
    resulting matrices are nearly consistent (mean CR well below 0.1)."""
    mags = {}

    def judge(codes):
        latent = {c: rng.uniform(0.0, spread) for c in codes}
        for i, a in enumerate(codes):
            for b in codes[i + 1 :]:
                mags[(a, b)] = int(min(5, max(-5, round(latent[b] - latent[a]))))

    if include_subcats:
        judge(list(taxonomy.subcategory_codes()))
    for sub in taxonomy.subcategories():
        judge([f.code for f in sub.features])
    return mags


def cyclic_magnitudes(taxonomy):
    """Strongly cyclic judgments (a beats b beats c beats a at extreme
    magnitude): a deliberately inconsistent expert."""
    mags = {}

    def judge(codes):
        k = len(codes)
        for i, a in enumerate(codes):
            for b in codes[i + 1 :]:
                j = codes.index(b)
                if (j - i) % k == 1 or (i == 0 and j == k - 1 and k > 2):
                    # neighbours: left wins; closing pair: right wins
                    mags[(a, b)] = 5 if (i == 0 and j == k - 1 and k > 2) else -5
                else:
                    mags[(a, b)] = 0
        if k == 2:
            mags[(codes[0], codes[1])] = -5

    judge(list(taxonomy.subcategory_codes()))
    for sub in taxonomy.subcategories():
        judge([f.code for f in sub.features])
    return mags


def make_flow(
    minutes=0.0,
    direction=OUTBOUND,
    peer_ip="203.0.113.10",
    device_port=49152,
    peer_port=443,
    protocol="TCP",
    packets=10,
    nbytes=1000,
    duration=1.0,
    start=None,
):
    return FlowRecord(
        start_time=(start or T0) + timedelta(minutes=minutes),
        duration=duration,
        direction=direction,
        peer_ip=peer_ip,
        device_port=device_port,
        peer_port=peer_port,
        protocol=protocol,
        packets=packets,
        bytes=nbytes,
    )


def flows_csv(rows):
    """CSV text for raw flow rows given as dicts."""
    header = "start_time,duration_s,src_ip,dst_ip,src_port,dst_port,protocol,packets,bytes"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['start_time']},{r.get('duration_s', 1.0)},{r['src_ip']},{r['dst_ip']},"
            f"{r.get('src_port', 49152)},{r.get('dst_port', 443)},{r.get('protocol', 'TCP')},"
            f"{r.get('packets', 10)},{r.get('bytes', 1000)}"
        )
    return "\n".join(lines) + "\n"
