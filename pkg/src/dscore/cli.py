"""Command-line entry point wiring the pipeline.

Subcommands::

    weights            derive a detectability model from expert responses
    extract            build a device profile from flows + declared values
    score              score device profiles against persisted models
    predictability     KPI / Hurst / ANOVA / t-test / correlation report
    validate-taxonomy  structural check of a taxonomy config
    filtering-stats    keep-percentages of categories per scenario

Exit codes: 0 success, 1 input error, 2 numeric failure, 3 policy refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__, ahp, responses, scoring, stats, taxonomy, traffic
from .errors import (
    ConvergenceError,
    DscoreError,
    EmptyCohortError,
    InputError,
    InsufficientProfileError,
)


class _Parser(argparse.ArgumentParser):
    # route usage errors through the normal exit-code mapping (1, not 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--taxonomy", metavar="PATH", help="taxonomy config (default: shipped)")
    parser.add_argument(
        "--scenario-config", metavar="PATH", help="scenario config (default: shipped)"
    )
    parser.add_argument("--out-dir", metavar="DIR", default=".", help="artifact output directory")
    parser.add_argument("--format", choices=("table", "json"), default="table")
    parser.add_argument("--cr-threshold", type=float, default=None, metavar="X",
                        help="drop responses whose mean CR exceeds X (weights)")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def _load_taxonomy(args) -> taxonomy.Taxonomy:
    if args.taxonomy:
        return taxonomy.load_taxonomy(args.taxonomy)
    return taxonomy.default_taxonomy()


def _load_scenarios(args) -> dict[str, scoring.ScenarioSpec]:
    if args.scenario_config:
        return scoring.load_scenarios(args.scenario_config)
    return scoring.default_scenarios()


def _out_dir(args) -> Path:
    path = Path(args.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit_json(payload) -> None:
    print(json.dumps(payload, indent=2))


def _table(rows: list[list[str]], header: list[str]) -> str:
    widths = [max(len(str(row[i])) for row in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(str(cell).ljust(w) for cell, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


# --- weights -----------------------------------------------------------------

def cmd_weights(args) -> int:
    tax = _load_taxonomy(args)
    parsed = responses.parse_responses(args.responses, tax)
    cohort = [r for r in parsed if r.scenario == args.scenario]
    if not cohort:
        raise EmptyCohortError(f"no responses for scenario {args.scenario!r}")

    completed = [responses.complete(r, tax) for r in cohort]
    fragments = [ahp.response_weights(r, tax) for r in completed]
    model = ahp.aggregate(
        fragments,
        cr_threshold=args.cr_threshold,
        include_subcategory_cr=args.include_subcategory_cr,
        taxonomy_version=tax.version,
    )
    out_path = _out_dir(args) / f"model_{args.scenario}.json"
    ahp.save_model(model, out_path, tool_version=__version__)

    retained_ids = set(model.contributing_responses)
    retained = [f for f in fragments if f.response_id in retained_ids]
    sub_agreement = feat_agreement = None
    if len(retained) >= 2:
        sub_agreement = ahp.agreement([f.subcategory_weights for f in retained])
        feat_agreement = ahp.agreement([f.feature_weights for f in retained])

    flags = {c.response_id: list(c.quality_flags) for c in completed if c.quality_flags}

    if args.format == "json":
        _emit_json(
            {
                "scenario": args.scenario,
                "model_file": str(out_path),
                "responses": len(cohort),
                "cohort_after_filtering": len(model.contributing_responses),
                "cr_threshold": args.cr_threshold,
                "mean_cr_per_response": model.mean_cr_per_response,
                "subcategory_weights": model.subcategory_weights.as_dict(),
                "feature_weights": model.feature_weights.as_dict(),
                "agreement_subcategories": sub_agreement,
                "agreement_features": feat_agreement,
                "quality_flags": flags,
            }
        )
        return 0

    print(f"scenario: {args.scenario}")
    print(f"responses: {len(cohort)}  cohort after CR filtering: "
          f"{len(model.contributing_responses)}"
          + (f" (threshold {args.cr_threshold})" if args.cr_threshold is not None else ""))
    print()
    print(_table(
        [[rid, f"{cr:.4f}", "kept" if rid in retained_ids else "dropped"]
         for rid, cr in sorted(model.mean_cr_per_response.items())],
        ["response", "mean CR", "status"],
    ))
    print()
    print(_table(
        [[code, f"{w:.6f}"] for code, w in model.subcategory_weights.as_dict().items()],
        ["sub-category", "weight"],
    ))
    print()
    print(_table(
        [[code, f"{w:.6f}"] for code, w in model.feature_weights.as_dict().items()],
        ["feature", "weight"],
    ))
    print()
    if sub_agreement is None:
        print("agreement: n/a (fewer than 2 responses)")
    else:
        print(f"agreement (sub-categories): {sub_agreement:.4f}")
        print(f"agreement (features):       {feat_agreement:.4f}")
    if flags:
        print(f"quality notes: {len(flags)} response(s) with unjudged kept pairs")
        if args.verbose:
            for rid in sorted(flags):
                for note in flags[rid]:
                    print(f"  {rid}: {note}")
    print(f"model written to {out_path}")
    return 0


# --- extract -----------------------------------------------------------------

def cmd_extract(args) -> int:
    tax = _load_taxonomy(args)
    model_id, static_values = traffic.load_static_profile(args.static_profile, tax)
    flows = traffic.load_flows(args.flows, args.device_ip)
    if not flows:
        raise InputError(f"no flows for device {args.device_ip} in {args.flows}")
    extraction = traffic.extract_dynamic_features(flows)
    profile = traffic.build_profile(
        model_id,
        static_values,
        extraction,
        tax,
        capture_window=traffic.capture_window_of(flows),
    )
    safe_id = model_id.replace("/", "_").replace(" ", "_")
    out_path = _out_dir(args) / f"profile_{safe_id}.json"
    traffic.save_profile(profile, out_path, tool_version=__version__)

    if args.format == "json":
        _emit_json(
            {
                "model_id": model_id,
                "profile_file": str(out_path),
                "static_values": profile.static_values,
                "dynamic_values": profile.dynamic_values,
                "missing": profile.missing,
            }
        )
        return 0

    print(f"model: {model_id}  ({len(flows)} flows)")
    rows = [[c, f"{v:.6g}", "declared"] for c, v in sorted(profile.static_values.items())]
    rows += [[c, f"{v:.6g}", "extracted"] for c, v in sorted(profile.dynamic_values.items())]
    print(_table(rows, ["feature", "value", "origin"]))
    if profile.missing:
        print()
        print("missing features:")
        for code, reason in sorted(profile.missing.items()):
            print(f"  {code}: {reason}")
    print(f"profile written to {out_path}")
    return 0


# --- score -------------------------------------------------------------------

def cmd_score(args) -> int:
    tax = _load_taxonomy(args)
    scenarios = _load_scenarios(args)
    models = [ahp.load_model(p) for p in args.model]
    profiles = [traffic.load_profile(p) for p in args.profile]

    cards = []
    for model in models:
        spec = scenarios.get(model.scenario)
        if spec is None:
            raise InputError(f"scenario {model.scenario!r} is not configured")
        params = scoring.normalization_params(tax, spec)
        for profile in profiles:
            cards.append(scoring.d_score(model, profile, params, bins=spec.bins))

    out_path = _out_dir(args) / "scorecards.json"
    payload = [
        {
            "model_id": c.model_id,
            "scenario": c.scenario,
            "d_score": c.d_score,
            "label": c.label,
            "normalized_values": c.normalized_values,
            "missing_features": c.missing_features,
            "taxonomy_version": tax.version,
            "tool_version": __version__,
        }
        for c in cards
    ]
    out_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    if args.format == "json":
        _emit_json(payload)
        return 0

    for card in cards:
        print(card.summary_line())

    if len(models) >= 2 and len(profiles) >= 2:
        scores = {(c.model_id, c.scenario): c.d_score for c in cards}
        ranking = scoring.maximin_rank(scores)
        scenario_cols = sorted({c.scenario for c in cards})
        rows = []
        for i, entry in enumerate(ranking):
            rows.append(
                [("*" if i == 0 else " ") + entry.model_id]
                + [f"{entry.scores[s]:.3f}" for s in scenario_cols]
                + [f"{max(entry.scores.values()):.3f}",
                   f"{entry.mean_score:.3f}",
                   f"{entry.min_score:.3f}"]
            )
        print()
        print(_table(rows, ["model"] + scenario_cols + ["max", "mean", "min"]))
        print("* maximin choice (highest worst-case score)")
    print(f"scorecards written to {out_path}")
    return 0


# --- predictability ----------------------------------------------------------

def _load_manifest(path: str) -> list[dict]:
    base = Path(path).parent
    devices = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"device", "group", "device_ip", "flow_file"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            missing = sorted(required - set(reader.fieldnames or []))
            raise InputError(f"manifest is missing columns: {', '.join(missing)}")
        for row in reader:
            flow_file = Path(row["flow_file"])
            if not flow_file.is_absolute():
                flow_file = base / flow_file
            static = (row.get("static_profile") or "").strip()
            devices.append(
                {
                    "device": row["device"].strip(),
                    "group": row["group"].strip(),
                    "device_ip": row["device_ip"].strip(),
                    "flow_file": flow_file,
                    "static_profile": (base / static) if static and not Path(static).is_absolute()
                    else (Path(static) if static else None),
                }
            )
    if not devices:
        raise InputError("manifest lists no devices")
    return devices


def cmd_predictability(args) -> int:
    tax = _load_taxonomy(args)
    devices = _load_manifest(args.manifest)

    kpi_series: dict[str, dict[str, tuple[float, ...]]] = {}
    static_values: dict[str, dict[str, float]] = {}
    for dev in devices:
        flows = traffic.load_flows(dev["flow_file"], dev["device_ip"])
        if not flows:
            raise InputError(f"no flows for device {dev['device']}")
        kpi_series[dev["device"]] = {
            s.kpi: s.values for s in traffic.compute_kpis(flows, device=dev["device"])
        }
        if dev["static_profile"]:
            _, vals = traffic.load_static_profile(dev["static_profile"], tax)
            static_values[dev["device"]] = vals

    groups = sorted({d["group"] for d in devices})
    by_group: dict[str, list[str]] = {g: [] for g in groups}
    for dev in devices:
        by_group[dev["group"]].append(dev["device"])

    report: dict = {"devices": {}, "hurst": {}, "group_tests": {}, "correlations": []}

    # per-device KPI summaries
    for device in sorted(kpi_series):
        report["devices"][device] = {
            kpi: {
                "n": len(vals),
                "mean": float(sum(vals) / len(vals)),
                "min": float(min(vals)),
                "max": float(max(vals)),
            }
            for kpi, vals in kpi_series[device].items()
        }

    # Hurst table (KPI column order fixed)
    hurst_rows = []
    hurst_values: dict[str, dict[str, float]] = {g: {} for g in groups}
    for dev in devices:
        row = [dev["device"]]
        for kpi in traffic.KPI_NAMES:
            vals = kpi_series[dev["device"]].get(kpi)
            if vals is None:
                row.append("n/a (no data)")
                continue
            try:
                est = stats.hurst(vals, min_length=args.hurst_min_length)
                row.append(f"{est.h:.3f}")
                report["hurst"].setdefault(dev["device"], {})[kpi] = est.h
                hurst_values[dev["group"]].setdefault(kpi, []).append(est.h)
            except (DscoreError, ValueError) as exc:
                row.append("n/a")
                report["hurst"].setdefault(dev["device"], {})[kpi] = None
                if args.verbose:
                    print(f"note: hurst({dev['device']}, {kpi}): {exc}", file=sys.stderr)
        hurst_rows.append(row)
    for group in groups:
        for tag, fn in (("average", lambda v: sum(v) / len(v)), ("range", lambda v: max(v) - min(v))):
            row = [f"{group} {tag}"]
            for kpi in traffic.KPI_NAMES:
                vals = hurst_values[group].get(kpi, [])
                row.append(f"{fn(vals):.3f}" if vals else "n/a")
            hurst_rows.append(row)

    # between-group tests per KPI
    multi_device = len(devices) >= 2 and len(groups) >= 2
    if multi_device:
        for kpi in traffic.KPI_NAMES:
            pooled = {
                g: [v for d in by_group[g] for v in kpi_series[d].get(kpi, ())]
                for g in groups
            }
            usable = {g: vals for g, vals in pooled.items() if len(vals) >= 2}
            if len(usable) < 2:
                report["group_tests"][kpi] = {"note": "not enough data in at least 2 groups"}
                continue
            ordered_groups = sorted(usable)
            anova = stats.anova_oneway([usable[g] for g in ordered_groups])
            ttests = {}
            for i, ga in enumerate(ordered_groups):
                for gb in ordered_groups[i + 1 :]:
                    t = stats.t_test_two_sided(usable[ga], usable[gb])
                    ttests[f"{ga} vs {gb}"] = {
                        "t": t.statistic,
                        "p": t.p_value,
                        "ci_95": list(t.ci_95),
                        "df": t.df,
                    }
            report["group_tests"][kpi] = {
                "anova_f": anova.statistic,
                "anova_p": anova.p_value,
                "anova_df": list(anova.df),
                "t_tests": ttests,
            }

    # static-feature correlations against per-device KPI means
    codes = args.correlate_static or sorted(
        {code for vals in static_values.values() for code in vals}
    )
    for code in codes:
        xs, devs = [], []
        for device in sorted(static_values):
            if code in static_values[device]:
                xs.append(static_values[device][code])
                devs.append(device)
        if len(xs) < 2:
            continue
        for kpi in traffic.KPI_NAMES:
            ys = [report["devices"][d][kpi]["mean"] for d in devs if kpi in report["devices"][d]]
            if len(ys) != len(xs):
                continue
            try:
                r = stats.pearson(xs, ys)
            except DscoreError:
                continue
            report["correlations"].append({"feature": code, "kpi": kpi, "pearson_r": r})

    if args.format == "json":
        _emit_json(report)
        return 0

    print("per-device KPI summaries")
    for device in sorted(report["devices"]):
        parts = []
        for kpi in traffic.KPI_NAMES:
            summary = report["devices"][device].get(kpi)
            parts.append(
                f"{kpi}: n={summary['n']} mean={summary['mean']:.2f}" if summary else f"{kpi}: n/a"
            )
        print(f"  {device}: " + "; ".join(parts))
    print()
    print("Hurst exponents")
    print(_table(hurst_rows, ["device"] + list(traffic.KPI_NAMES)))
    print()
    if not multi_device:
        print("group tests skipped (need at least 2 devices in 2 groups)")
    else:
        print("between-group tests")
        for kpi in traffic.KPI_NAMES:
            res = report["group_tests"].get(kpi, {})
            if "note" in res:
                print(f"  {kpi}: {res['note']}")
                continue
            print(f"  {kpi}: ANOVA F={res['anova_f']:.4f} p={res['anova_p']:.4g}")
            for pair, t in res["t_tests"].items():
                lo, hi = t["ci_95"]
                print(
                    f"    {pair}: t={t['t']:.4f} p={t['p']:.4g} "
                    f"CI95=({lo:.3f}, {hi:.3f})"
                )
    if report["correlations"]:
        print()
        print("static-feature vs KPI-mean correlations")
        for item in report["correlations"]:
            print(f"  {item['feature']} ~ {item['kpi']}: r={item['pearson_r']:.3f}")
    return 0


# --- small commands ----------------------------------------------------------

def cmd_validate_taxonomy(args) -> int:
    tax = _load_taxonomy(args)
    violations = taxonomy.validate(tax)
    if args.format == "json":
        _emit_json({"version": tax.version, "violations": violations})
    else:
        if violations:
            for v in violations:
                print(v)
        else:
            print(f"taxonomy {tax.version} ok: "
                  f"{len(tax.categories)} categories, "
                  f"{len(tax.subcategories())} sub-categories, "
                  f"{tax.count_features()} features")
    return 1 if violations else 0


def cmd_filtering_stats(args) -> int:
    tax = _load_taxonomy(args)
    parsed = responses.parse_responses(args.responses, tax)
    table = responses.filtering_stats(parsed, tax)
    if args.format == "json":
        _emit_json(table)
        return 0
    for scenario, block in table.items():
        print(f"{scenario} ({block['responses']} responses)")
        rows = [[code, f"{frac * 100:.0f}%"] for code, frac in block["categories"].items()]
        rows += [[code, f"{frac * 100:.0f}%"] for code, frac in block["subcategories"].items()]
        print(_table(rows, ["element", "kept"]))
        print()
    return 0


# --- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dscore", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", help="derive a detectability model from expert responses")
    _common_options(p)
    p.add_argument("--responses", required=True, metavar="FILE")
    p.add_argument("--scenario", required=True, metavar="CODE")
    p.add_argument("--include-subcategory-cr", action="store_true",
                   help="include the sub-category matrix CR in the quality metric")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("extract", help="build a device profile from flows and declared values")
    _common_options(p)
    p.add_argument("--flows", required=True, metavar="FILE")
    p.add_argument("--device-ip", required=True, metavar="IP")
    p.add_argument("--static-profile", required=True, metavar="FILE")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("score", help="score device profiles against persisted models")
    _common_options(p)
    p.add_argument("--model", action="append", required=True, metavar="FILE")
    p.add_argument("--profile", action="append", required=True, metavar="FILE")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("predictability", help="traffic predictability report")
    _common_options(p)
    p.add_argument("--manifest", required=True, metavar="FILE",
                   help="CSV: device,group,device_ip,flow_file[,static_profile]")
    p.add_argument("--hurst-min-length", type=int, default=100, metavar="N")
    p.add_argument("--correlate-static", action="append", metavar="CODE",
                   help="static feature code(s) to correlate against KPI means")
    p.set_defaults(func=cmd_predictability)

    p = sub.add_parser("validate-taxonomy", help="check taxonomy structural invariants")
    _common_options(p)
    p.set_defaults(func=cmd_validate_taxonomy)

    p = sub.add_parser("filtering-stats", help="keep-percentages per scenario")
    _common_options(p)
    p.add_argument("--responses", required=True, metavar="FILE")
    p.set_defaults(func=cmd_filtering_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InsufficientProfileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DscoreError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
