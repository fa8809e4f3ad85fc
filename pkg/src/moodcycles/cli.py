"""Command-line pipeline driver.

Each subcommand runs one stage on files produced by the previous stage (no
hidden state) and writes its artifacts atomically into --out, together with
a manifest entry recording input digests and row counts. Options may come
from a flat key=value --config file; command-line flags win.

Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

import numpy as np

from . import countries, eigenmood as em, io, sentiment, stats, synth
from .errors import DataError, MoodcyclesError, NumericalError
from .pipeline import RunManifest, config_hash, load_config, write_manifest
from .timeseries import (
    AnchorKind,
    average_years,
    build_centered_years,
    normalize_births,
    normalize_yearly_max,
    zscore,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise UsageError(f"not a boolean: {text!r}")


# Config file keys and how to coerce their string values. Flags always win.
CONFIG_TYPES = {
    "series": str, "a": str, "b": str, "zscores": str, "births": str,
    "records": str, "lexicons": str, "stoplist": str, "binned": str,
    "x": str, "y": str, "out": str, "eid_dates": str, "search": str,
    "anchor": str, "years": str, "country": str, "dims": str,
    "holiday_weeks": str, "holiday": str,
    "threshold": float, "var_threshold": float, "shift": int,
    "bins": int, "permutations": int, "seed": int, "min_overlap": int,
    "records_per_week": int, "n_years": int,
    "orthodox_as_other": _bool, "alt_score": _bool, "no_stoplist": _bool,
}

_DIM_ALIASES = {"v": "valence", "a": "arousal", "d": "dominance"}


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join(f"--{n}" for n in missing))


def _out_dir(args) -> Path:
    _need(args, "out")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_years(text: str) -> range:
    try:
        first, _, last = text.partition("-")
        y0, y1 = int(first), int(last or first)
    except ValueError:
        raise UsageError(f"bad year range {text!r}, expected e.g. 2004-2013") from None
    if y1 < y0:
        raise UsageError(f"empty year range {text!r}")
    return range(y0, y1 + 1)


def _parse_dates(text: str) -> list[dt.date]:
    try:
        return [dt.date.fromisoformat(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad date list {text!r}: {exc}") from None


def _parse_dims(text: str) -> list[str]:
    dims = []
    for part in text.split(","):
        name = _DIM_ALIASES.get(part.strip().lower(), part.strip().lower())
        if name not in sentiment.DIMENSIONS:
            raise UsageError(f"unknown dimension {part!r}")
        if name not in dims:
            dims.append(name)
    if not dims:
        raise UsageError("no dimensions given")
    return dims


def _stoplist(args, manifest: RunManifest) -> sentiment.GreetingStoplist | None:
    if getattr(args, "no_stoplist", False):
        return None
    if getattr(args, "stoplist", None):
        manifest.add_input(args.stoplist)
        return sentiment.GreetingStoplist(io.read_stoplist_lines(args.stoplist))
    return sentiment.GreetingStoplist.default()


def _scored_records(args, manifest: RunManifest) -> list[sentiment.ScoredRecord]:
    _need(args, "records", "lexicons")
    manifest.add_input(args.records)
    manifest.add_input(args.lexicons)
    records, n_malformed = io.read_records(args.records)
    lexicons = sentiment.load_lexicons(args.lexicons)
    stoplist = _stoplist(args, manifest)
    scored = sentiment.score_records(records, lexicons, stoplist)
    manifest.counts["records"] = len(records)
    manifest.counts["records_malformed"] = n_malformed
    manifest.counts["records_unscored"] = sum(1 for r in scored if r.score is None)
    if n_malformed:
        manifest.warnings.append(f"{n_malformed} malformed record lines skipped")
    return scored


# ------------------------------------------------------------------ subcommands

def cmd_center(args, manifest: RunManifest) -> None:
    _need(args, "series", "anchor")
    out = _out_dir(args)
    manifest.add_input(args.series)
    series = io.read_weekly_series(args.series)
    kind = AnchorKind(args.anchor)
    years = _parse_years(args.years)
    if kind is AnchorKind.EID_AL_FITR and args.eid_dates:
        manifest.add_input(args.eid_dates)
    cal = io.calendar_for(kind, years, args.eid_dates)
    warnings: list[str] = []
    centered = build_centered_years(series, cal, warnings=warnings)
    if not centered:
        raise DataError("no complete centered years in the series span")
    manifest.counts["centered_years"] = len(centered)
    manifest.counts["dropped_weeks"] = sum(len(y.dropped_weeks) for y in centered)
    manifest.warnings.extend(warnings)
    io.write_centered_years(out / "centered.csv", centered)
    avg = average_years(normalize_yearly_max(centered))
    io.write_averaged_year(out / "averaged.csv", avg)
    z = zscore(avg.weeks)
    io.write_table(out / "zscores.csv", ["week_index", "z"],
                   [[i, float(v)] for i, v in enumerate(z, start=1)])
    anchor_z = float(z[cal.anchor_week_index - 1])
    io.write_table(out / "anchor_z.csv", ["anchor", "week_index", "z"],
                   [[kind.value, cal.anchor_week_index, anchor_z]])
    print(f"{len(centered)} centered years; anchor-week z = {anchor_z:.3f}")


def _classification_rows(profiles):
    rows = []
    for p in profiles:
        rows.append([
            p.code, p.name, p.identification, p.hemisphere,
            p.response.z_christmas, p.response.z_eid,
            p.response.z_june, p.response.z_dec,
            p.classification.label, "+".join(p.classification.basis),
            "yes" if p.classification.tie_resolved else "no",
        ])
    return rows


_CLASSIFICATION_HEADER = [
    "code", "name", "identification", "hemisphere",
    "z_christmas", "z_eid", "z_june", "z_dec", "label", "basis", "tie_resolved",
]

_AGREEMENT_HEADER = ["group_kind", "group", "anchor", "n_group", "n_above", "pct_exact", "pct"]


def _agreement_rows(rows):
    return [
        [r["group_kind"], r["group"], r["anchor"], r["n_group"], r["n_above"],
         r["pct_exact"], r["pct"]]
        for r in rows
    ]


def _load_profiles(args, manifest: RunManifest):
    if args.zscores:
        manifest.add_input(args.zscores)
    zrows = io.read_zscore_table(args.zscores or None)
    return countries.build_profiles(zrows, args.threshold, args.orthodox_as_other)


def cmd_classify(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    profiles = _load_profiles(args, manifest)
    manifest.counts["countries"] = len(profiles)
    io.write_table(out / "classification.csv", _CLASSIFICATION_HEADER, _classification_rows(profiles))
    agreement = countries.cohort_agreement(profiles, args.threshold)
    io.write_table(out / "agreement.csv", _AGREEMENT_HEADER, _agreement_rows(agreement))
    labels = {label: sum(1 for p in profiles if p.classification.label == label)
              for label in ("Christian", "Muslim", "Other")}
    print(f"classified {len(profiles)} countries: " +
          ", ".join(f"{k}={v}" for k, v in labels.items()))


def cmd_compare_terms(args, manifest: RunManifest) -> None:
    _need(args, "a", "b")
    out = _out_dir(args)
    manifest.add_input(args.a)
    manifest.add_input(args.b)
    a = io.read_weekly_series(args.a)
    b = io.read_weekly_series(args.b)
    ratio, r = countries.compare_search_terms(a, b, args.min_overlap)
    io.write_table(out / "compare.csv", ["volume_ratio", "pearson_r"], [[ratio, r]])
    manifest.counts["weeks_a"] = len(a)
    manifest.counts["weeks_b"] = len(b)
    print(f"volume ratio = {io.fmt(ratio)}, pearson r = {io.fmt(r)}")


def cmd_births(args, manifest: RunManifest) -> None:
    _need(args, "births")
    out = _out_dir(args)
    manifest.add_input(args.births)
    data = io.read_births(args.births)
    shifted = {country: normalize_births(entries, args.shift) for country, entries in data.items()}
    rows = io.write_birth_series(out / "shifted_births.csv", shifted)
    manifest.counts["countries"] = len(shifted)
    manifest.counts["rows"] = rows
    print(f"shifted birth series for {len(shifted)} countries ({rows} rows)")


def cmd_score(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    scored = _scored_records(args, manifest)
    if args.country:
        wanted = [args.country]
    else:
        wanted = sorted({r.country for r in scored if r.country != "unknown"})
    rows = []
    n_gaps = n_low = 0
    for country in wanted:
        weeks, gaps = sentiment.aggregate(scored, country)
        n_gaps += len(gaps)
        for week in weeks:
            if week.low_confidence:
                n_low += 1
            for dim in sentiment.DIMENSIONS:
                rows.append((country, week.week_start, dim,
                             week.mean[sentiment.DIMENSIONS.index(dim)], week.n_scored))
        if gaps:
            manifest.warnings.append(f"{country}: {len(gaps)} gap weeks with no scored records")
    if n_low:
        manifest.warnings.append(f"{n_low} low-confidence weeks (fewer than "
                                 f"{sentiment.LOW_CONFIDENCE_WEEK} scored records)")
    io.write_weekly_mood(out / "weekly_mood.csv", rows)
    manifest.counts["countries"] = len(wanted)
    manifest.counts["weekly_rows"] = len(rows)
    print(f"wrote weekly means for {len(wanted)} countries ({len(rows)} rows)")


def cmd_bin(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    scored = _scored_records(args, manifest)
    present = sorted({r.country for r in scored if r.country != "unknown" and r.score})
    country = args.country
    if not country:
        if len(present) != 1:
            raise UsageError("--country is required when records cover several countries")
        country = present[0]
    by_week = sentiment.weekly_scores(scored, country)
    if not by_week:
        raise DataError(f"no scored records for country {country!r}")
    binned = sentiment.bin_weeks(by_week, args.bins)
    io.write_binned(out / "binned.tsv",
                    [(b.week_start, b.dimension, b.n_scored, b.probs) for b in binned],
                    args.bins)
    manifest.counts["weeks"] = len(by_week)
    manifest.counts["binned_rows"] = len(binned)
    print(f"binned {len(by_week)} weeks for {country} into {args.bins} bins")


def _load_matrices(args, manifest: RunManifest) -> dict[str, em.BinnedMoodMatrix]:
    _need(args, "binned")
    manifest.add_input(args.binned)
    data = io.read_binned(args.binned)
    dims = _parse_dims(args.dims)
    matrices = {}
    for dim in dims:
        if dim not in data:
            raise DataError(f"{args.binned}: no rows for dimension {dim!r}")
        weeks, _, probs = data[dim]
        matrices[dim] = em.BinnedMoodMatrix(dimension=dim, week_starts=tuple(weeks), matrix=probs)
    return matrices


def _holiday_rows(args, matrices: dict[str, em.BinnedMoodMatrix]) -> list[int]:
    _need(args, "holiday-weeks")
    week_lists = {m.week_starts for m in matrices.values()}
    if len(week_lists) != 1:
        raise DataError("binned dimensions disagree on their week lists")
    weeks = next(iter(week_lists))
    rows = []
    for day in _parse_dates(args.holiday_weeks):
        try:
            rows.append(weeks.index(day))
        except ValueError:
            raise DataError(f"holiday week {day} is not present in the binned data") from None
    return rows


def _select(args, manifest: RunManifest):
    matrices = _load_matrices(args, manifest)
    rows = _holiday_rows(args, matrices)
    decs = {dim: em.decompose(m) for dim, m in matrices.items()}
    mood = em.select_eigenmood(decs, rows, holiday=args.holiday,
                               var_threshold=args.var_threshold, alt_score=args.alt_score)
    manifest.counts["weeks"] = next(iter(matrices.values())).n_weeks
    manifest.counts["holiday_weeks"] = len(rows)
    manifest.counts["candidates"] = len(mood.selection)
    return matrices, decs, rows, mood


def _write_eigenmood_json(out: Path, mood: em.Eigenmood, args) -> None:
    # component indices are reported both absolute (1 = base distribution)
    # and relative to the post-baseline tail, since either convention is
    # common when naming components like "v4".
    payload = {
        "holiday": mood.holiday,
        "var_threshold": args.var_threshold,
        "alt_score": bool(args.alt_score),
        "components": [
            {
                "dimension": c.dimension,
                "index": c.index,
                "index_after_baseline": c.index - 1,
                "label": c.label,
                "singular_value": c.singular_value,
            }
            for c in mood.components
        ],
    }
    with io.atomic_write(out / "eigenmood.json") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _projections(matrices, mood) -> tuple[tuple, list[em.WeekProjection]]:
    needed = {c.dimension for c in mood.components}
    weeks = next(iter(matrices.values())).week_starts
    projs = em.project_weeks(mood, {d: matrices[d] for d in needed})
    return weeks, projs


def cmd_eigenmood(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    matrices, decs, rows, mood = _select(args, manifest)

    dec_rows = []
    for dim in sentiment.DIMENSIONS:
        if dim in decs:
            dec = decs[dim]
            for k in range(1, dec.rank + 1):
                dec_rows.append([dim, k, float(dec.S[k - 1]), float(dec.rel_var[k - 1])])
    io.write_table(out / "decomposition.csv",
                   ["dimension", "component", "singular_value", "rel_var"], dec_rows)

    selected = {(c.dimension, c.index) for c in mood.components}
    sel_rows = [
        [rank, c.dimension, c.index, c.index - 1, c.mean, c.std, c.score,
         "yes" if (c.dimension, c.index) in selected else "no"]
        for rank, c in enumerate(mood.selection, start=1)
    ]
    io.write_table(out / "selection.csv",
                   ["rank", "dimension", "component", "component_after_baseline",
                    "mean", "std", "score", "selected"], sel_rows)
    _write_eigenmood_json(out, mood, args)

    weeks, projs = _projections(matrices, mood)
    io.write_table(out / "projections.csv", ["week_start", "coord1", "coord2"],
                   [[w.isoformat(), p.coords[0], p.coords[1]] for w, p in zip(weeks, projs)])

    # linguistic characterization of the holiday's mean reconstructed change,
    # per dimension actually selected
    ling_rows = []
    for dim in sentiment.DIMENSIONS:
        comps = [c for c in mood.components if c.dimension == dim]
        if not comps:
            continue
        dec = decs[dim]
        recon_row = np.zeros(matrices[dim].n_bins)
        for c in comps:
            mean_coord = float(np.mean([dec.coord(r, c.index) for r in rows]))
            recon_row += mean_coord * c.eigenbin
        for level, value in em.linguistic_response(recon_row).items():
            ling_rows.append([dim, level, value])
    io.write_table(out / "linguistic.csv", ["dimension", "level", "response"], ling_rows)

    # heatmaps of the two-component reconstruction, one per selected dimension
    for dim in sorted({c.dimension for c in mood.components}):
        comps = [c for c in mood.components if c.dimension == dim]
        dec = decs[dim]
        idx = [c.index - 1 for c in comps]
        recon = (dec.U[:, idx] * dec.S[idx]) @ dec.V[:, idx].T
        dev, signs = em.heatmap(recon)
        weeks_header = [w.isoformat() for w in matrices[dim].week_starts]
        io.write_table(out / f"heatmap_{dim}.tsv", ["bin"] + weeks_header,
                       [[b + 1] + [float(v) for v in row] for b, row in enumerate(dev)],
                       delimiter="\t")
        io.write_table(out / f"heatmap_{dim}_signs.tsv", ["bin"] + weeks_header,
                       [[b + 1] + row for b, row in enumerate(signs)], delimiter="\t")

    print(f"eigenmood for {mood.holiday}: {mood.labels[0]}, {mood.labels[1]} "
          f"({len(mood.selection)} candidates)")


def cmd_similarity(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    matrices, decs, rows, mood = _select(args, manifest)
    weeks, projs = _projections(matrices, mood)
    holiday_mean = em.mean_projection([projs[r] for r in rows])
    sims = [em.similarity(p, holiday_mean) for p in projs]
    io.write_table(out / "projections.csv",
                   ["week_start", "coord1", "coord2", "similarity"],
                   [[w.isoformat(), p.coords[0], p.coords[1], s]
                    for w, p, s in zip(weeks, projs, sims)])
    io.write_table(out / "similarity.csv", ["week_start", "similarity"],
                   [[w.isoformat(), s] for w, s in zip(weeks, sims)])
    _write_eigenmood_json(out, mood, args)
    print(f"projected {len(weeks)} weeks onto {mood.labels[0]}, {mood.labels[1]}")


def _joined(y_path: str, x_paths: list[str]) -> tuple[np.ndarray, np.ndarray, list[str]]:
    y_map = io.read_keyed_values(y_path)
    x_maps = [io.read_keyed_values(p) for p in x_paths]
    keys = sorted(set(y_map).intersection(*x_maps))
    if len(keys) < 3:
        raise DataError(f"only {len(keys)} keys shared between y and x files")
    y = np.array([y_map[k] for k in keys])
    X = np.column_stack([[m[k] for k in keys] for m in x_maps])
    return X, y, keys


def cmd_regress(args, manifest: RunManifest) -> None:
    _need(args, "y", "x")
    out = _out_dir(args)
    x_paths = [p.strip() for p in args.x.split(",") if p.strip()]
    manifest.add_input(args.y)
    for p in x_paths:
        manifest.add_input(p)
    X, y, keys = _joined(args.y, x_paths)
    result = stats.ols(X, y)
    manifest.counts["observations"] = result.n
    rows = [["n", float(result.n)],
            ["r_squared", result.r_squared],
            ["f_stat", result.f_stat],
            ["f_pvalue", result.f_pvalue],
            ["intercept", result.intercept]]
    bonf = result.bonferroni(len(x_paths))
    for i, path in enumerate(x_paths):
        name = Path(path).stem
        rows.append([f"coef_{name}", float(result.coef[i])])
        rows.append([f"t_{name}", float(result.t_stats[i])])
        rows.append([f"t_pvalue_{name}", float(result.t_pvalues[i])])
        rows.append([f"t_pvalue_bonferroni_{name}", float(bonf[i])])
    io.write_table(out / "regression.csv", ["field", "value"], rows)
    print(f"OLS on {result.n} observations: R^2 = {result.r_squared:.4f}, "
          f"F p = {result.f_pvalue:.3g}")


def cmd_dcor(args, manifest: RunManifest) -> None:
    _need(args, "x", "y")
    if args.permutations > 0 and args.seed is None:
        raise UsageError("--seed is required when --permutations > 0")
    out = _out_dir(args)
    manifest.add_input(args.x)
    manifest.add_input(args.y)
    X, y, _ = _joined(args.y, [args.x])
    x = X[:, 0]
    dcov = stats.distance_covariance(x, y)
    dcor = stats.distance_correlation(x, y)
    rows = [["dcov", dcov], ["dcor", dcor]]
    if args.permutations > 0:
        _, p = stats.permutation_test(x, y, stats.distance_covariance,
                                      args.permutations, args.seed)
        rows += [["permutation_p", p], ["n_permutations", float(args.permutations)]]
        manifest.counts["permutations"] = args.permutations
    manifest.counts["observations"] = len(y)
    io.write_table(out / "dcor.csv", ["field", "value"], rows)
    print(f"dCov = {io.fmt(dcov)}, dCor = {io.fmt(dcor)}" +
          (f", p = {io.fmt(rows[2][1])}" if args.permutations > 0 else ""))


def cmd_report(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    profiles = _load_profiles(args, manifest)
    io.write_table(out / "classification.csv", _CLASSIFICATION_HEADER, _classification_rows(profiles))
    agreement = countries.cohort_agreement(profiles, args.threshold)
    io.write_table(out / "agreement.csv", _AGREEMENT_HEADER, _agreement_rows(agreement))

    expected = io.expected_agreement()
    actual = {(r["group_kind"], r["group"], r["anchor"]): r["pct"] for r in agreement}
    variant = countries.build_profiles(io.read_zscore_table(args.zscores or None),
                                       args.threshold, orthodox_as_other=True)
    for row in countries.cohort_agreement(variant, args.threshold):
        if row["group_kind"] == "identification" and row["group"] == "Christian":
            actual[("identification-orthodox-as-other", "Christian", row["anchor"])] = row["pct"]
    check_rows = []
    mismatches = 0
    for key in sorted(expected):
        got = actual.get(key)
        ok = got == expected[key]
        if not ok:
            mismatches += 1
        check_rows.append(list(key) + [expected[key], "" if got is None else got,
                                       "yes" if ok else "NO"])
    io.write_table(out / "agreement_check.csv",
                   ["group_kind", "group", "anchor", "expected_pct", "actual_pct", "match"],
                   check_rows)
    manifest.counts["countries"] = len(profiles)
    manifest.counts["cells_checked"] = len(check_rows)
    manifest.counts["cells_mismatched"] = mismatches
    if mismatches:
        manifest.warnings.append(f"{mismatches} agreement cells differ from the expected table")

    lines = [
        "# Holiday classification report",
        "",
        f"Countries classified: {len(profiles)} (threshold z > {args.threshold}).",
        "",
        "## Agreement with self-reported identification and hemisphere",
        "",
        "| group kind | group | anchor | share above threshold |",
        "|---|---|---|---|",
    ]
    for r in agreement:
        lines.append(f"| {r['group_kind']} | {r['group']} | {r['anchor']} | "
                     f"{r['pct']}% ({r['n_above']}/{r['n_group']}) |")
    lines += [
        "",
        f"Expected-table check: {len(check_rows) - mismatches}/{len(check_rows)} cells match.",
        "",
    ]
    with io.atomic_write(out / "report.md") as fh:
        fh.write("\n".join(lines))
    status = "all cells match" if mismatches == 0 else f"{mismatches} MISMATCHES"
    print(f"report written ({status})")


def cmd_synth(args, manifest: RunManifest) -> None:
    out = _out_dir(args)
    spec = synth.SynthSpec(
        seed=args.seed if args.seed is not None else 42,
        n_years=args.n_years,
        records_per_week=args.records_per_week,
    )
    summary = synth.generate_synthetic(out, spec)
    manifest.counts["records"] = summary["n_records"]
    manifest.counts["weeks"] = summary["n_weeks"]
    print(f"synthetic corpus: {summary['n_records']} records over {summary['n_weeks']} weeks "
          f"(seed {spec.seed})")


# ------------------------------------------------------------------ entry point

def _build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="moodcycles", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    commands: dict[str, _Parser] = {}

    def add(name: str, func, help_text: str) -> _Parser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", help="output directory")
        commands[name] = p
        return p

    p = add("center", cmd_center, "re-center a weekly series on a recurring anchor")
    p.add_argument("--series", help="weekly series CSV (week_start,value)")
    p.add_argument("--anchor", help="civil | christmas | eid-al-fitr | june-solstice | december-solstice")
    p.add_argument("--years", default="2004-2013", help="solar anchor year range, e.g. 2004-2013")
    p.add_argument("--eid-dates", help="anchor date CSV overriding the bundled Eid table")

    p = add("classify", cmd_classify, "classify countries from holiday z-scores")
    p.add_argument("--zscores", help="z-score table CSV (default: bundled table)")
    p.add_argument("--threshold", type=float, default=1.0, help="z threshold (default 1.0)")
    p.add_argument("--orthodox-as-other", action="store_true",
                   help="group January-Christmas countries as Other")

    p = add("compare-terms", cmd_compare_terms, "volume ratio and correlation of two series")
    p.add_argument("--a", help="numerator weekly series CSV")
    p.add_argument("--b", help="reference weekly series CSV")
    p.add_argument("--min-overlap", type=int, default=8, help="minimum overlapping weeks")

    p = add("births", cmd_births, "normalize monthly births and shift to conception months")
    p.add_argument("--births", help="monthly births CSV (country,year,month,count)")
    p.add_argument("--shift", type=int, default=9, help="months to shift back (default 9)")

    for name, func, help_text in (
        ("score", cmd_score, "score text records and aggregate weekly means"),
        ("bin", cmd_bin, "score text records and bin weekly distributions"),
    ):
        p = add(name, func, help_text)
        p.add_argument("--records", help="TSV records: timestamp_utc, country, text")
        p.add_argument("--lexicons", help="lexicon CSV (language,word,valence,arousal,dominance)")
        p.add_argument("--stoplist", help="greeting stoplist file (default: bundled list)")
        p.add_argument("--no-stoplist", action="store_true", help="skip greeting removal")
        p.add_argument("--country", help="restrict to one country code")
        if name == "bin":
            p.add_argument("--bins", type=int, default=sentiment.N_BINS,
                           help="number of score bins (default 25)")

    for name, func, help_text in (
        ("eigenmood", cmd_eigenmood, "decompose binned weeks and select a holiday eigenmood"),
        ("similarity", cmd_similarity, "project weeks and compare them with the holiday mean"),
    ):
        p = add(name, func, help_text)
        p.add_argument("--binned", help="binned TSV from the bin stage")
        p.add_argument("--holiday-weeks", help="comma-separated week-start dates of the holiday")
        p.add_argument("--holiday", default="holiday", help="name for the anchor in outputs")
        p.add_argument("--dims", default="v,a,d", help="dimensions to decompose (default v,a,d)")
        p.add_argument("--var-threshold", type=float, default=0.95,
                       help="share of post-baseline variance to keep (default 0.95)")
        p.add_argument("--alt-score", action="store_true",
                       help="rank candidates by |mean - std| instead of |mean| - std")

    p = add("regress", cmd_regress, "ordinary least squares between keyed CSV files")
    p.add_argument("--y", help="response CSV (key,value)")
    p.add_argument("--x", help="regressor CSV, or up to three comma-separated")

    p = add("dcor", cmd_dcor, "distance covariance/correlation with permutation test")
    p.add_argument("--x", help="regressor CSV (key,value)")
    p.add_argument("--y", help="response CSV (key,value)")
    p.add_argument("--permutations", type=int, default=999,
                   help="permutations for the p-value (default 999; 0 disables)")
    p.add_argument("--seed", type=int, help="RNG seed (required when permutations > 0)")

    p = add("report", cmd_report, "compose classification tables and check them")
    p.add_argument("--zscores", help="z-score table CSV (default: bundled table)")
    p.add_argument("--threshold", type=float, default=1.0, help="z threshold (default 1.0)")
    p.add_argument("--orthodox-as-other", action="store_true",
                   help="group January-Christmas countries as Other")

    p = add("synth", cmd_synth, "generate a deterministic synthetic corpus")
    p.add_argument("--seed", type=int, help="generator seed (default 42)")
    p.add_argument("--n-years", type=int, default=3, help="years of weekly data (default 3)")
    p.add_argument("--records-per-week", type=int, default=400,
                   help="records per week (default 400)")

    return parser, commands


def _apply_config(parser: _Parser, commands: dict[str, _Parser], argv: list[str]) -> argparse.Namespace:
    """Parse argv with config-file values installed as subcommand defaults.

    Config keys become the chosen subcommand's option defaults, so explicit
    flags always win. Keys the subcommand does not define are ignored (one
    config file may drive several pipeline stages), but every key must at
    least be a known option somewhere.
    """
    probe = _Parser(add_help=False)
    probe.add_argument("--config")
    known, rest = probe.parse_known_args(argv)
    if known.config:
        chosen = commands.get(rest[0]) if rest else None
        dests = {action.dest for action in chosen._actions} if chosen else set()
        for key, raw in load_config(known.config).items():
            if key not in CONFIG_TYPES:
                raise UsageError(f"unknown config key {key!r}")
            try:
                value = CONFIG_TYPES[key](raw)
            except (ValueError, UsageError) as exc:
                raise UsageError(f"config key {key!r}: bad value {raw!r}") from exc
            if chosen is not None and key in dests:
                chosen.set_defaults(**{key: value})
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = _build_parser()
    try:
        args = _apply_config(parser, commands, argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            print("moodcycles: a subcommand is required", file=sys.stderr)
            return 1
        settings = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
        manifest = RunManifest(command=args.command, config_hash=config_hash(settings))
        args.func(args, manifest)
        if getattr(args, "out", None):
            write_manifest(args.out, manifest)
        return 0
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (DataError, MoodcyclesError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
