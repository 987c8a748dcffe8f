"""Command-line pipeline over the library.

Subcommands mirror the analysis stages: ``ingest`` normalizes raw input
files, ``synth`` generates seeded corpora, ``fetch`` resolves DOIs to
reader counts against a provider endpoint, and ``fit``, ``collapse``,
``css`` and ``topz`` emit the analysis tables. ``report`` runs the four
analysis stages in one go.

Every table is written twice: a display-rounded TSV and a full-precision
line-JSON mirror with the same rows. Outputs are deterministic -- the same
inputs, flags and seeds produce byte-identical files -- so diffs between
runs mean the data changed, not the clock. A stratum that fails a
computation gets an error note in its row and the run continues; only
unreadable inputs, broken schemas or an unreachable provider abort.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import (
    DuplicateIdError,
    EmptyCorpusError,
    GroupKey,
    PublicationRecord,
    group_by_field_year,
    group_stats,
)
from .css import CLASS_NAMES, TRUNCATION_RULES, characteristic_scores, classify
from .distfit import DegenerateSampleError, ZeroPolicy, fit_lognormal, test_lognormality
from .fetch import Cache, FetchError, ProviderConfig, fetch_counts
from .ingest import IngestError, IngestReport, parse_records, validate, write_diagnostics, write_records
from .rescale import AllUnreadGroupError, ccdf, ccdf_filename, collapse, rescale_group, write_ccdf_tsv
from .swilk import UnsupportedSizeError, ZeroVarianceError
from .synth import SynthSpec, generate_corpus, generator_metadata
from .topz import TIE_RULES, VARIANTS, top_share_report

__all__ = ["main", "build_parser"]

log = logging.getLogger(__name__)

# CLI flag tokens -> distfit policy modes
ZERO_POLICY_FLAGS = {"exclude": "exclude", "shift1": "shift-one"}

DEFAULT_Z = (5.0, 10.0, 20.0)


# ---------------------------------------------------------------------------
# rendering


def _fmt1(v) -> str:
    return f"{float(v):.1f}"


def _fmt2(v) -> str:
    return f"{float(v):.2f}"


def _fmt3(v) -> str:
    return f"{float(v):.3f}"


def _fmt_int(v) -> str:
    return str(int(v))


def _fmt_num(v) -> str:
    """Counts that are usually integers but may be real on synthetic data."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):g}"


def _fmt_bool(v) -> str:
    return "true" if v else "false"


def _plain(v):
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_table(
    rows: Sequence[dict],
    columns: Sequence[str],
    renderers: dict[str, Callable],
    out_dir: Path,
    name: str,
    echo: str | None,
) -> None:
    """Write ``<name>.tsv`` (display-rounded) and ``<name>.jsonl`` (full
    precision), optionally echoing one of them to stdout. Missing values
    render as NA in the TSV and null in the line-JSON."""
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["\t".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            v = row.get(col)
            cells.append("NA" if v is None else renderers.get(col, str)(v))
        lines.append("\t".join(cells))
    tsv_text = "\n".join(lines) + "\n"
    (out_dir / f"{name}.tsv").write_text(tsv_text, encoding="utf-8")

    jsonl_text = "".join(
        json.dumps({c: _plain(row.get(c)) for c in columns}) + "\n" for row in rows
    )
    (out_dir / f"{name}.jsonl").write_text(jsonl_text, encoding="utf-8")
    log.info("wrote %s.tsv and %s.jsonl under %s", name, name, out_dir)
    if echo == "tsv":
        sys.stdout.write(tsv_text)
    elif echo == "jsonl":
        sys.stdout.write(jsonl_text)


# ---------------------------------------------------------------------------
# corpus loading


def _input_format(path: Path) -> tuple[str, str]:
    suffix = path.suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return "line-json", ","
    if suffix == ".tsv":
        return "delimited", "\t"
    return "delimited", ","


def _load_records(
    paths: Sequence[str], years: Sequence[int] | None
) -> list[PublicationRecord]:
    records: list[PublicationRecord] = []
    for p in paths:
        path = Path(p)
        fmt, delimiter = _input_format(path)
        recs, report = parse_records(path, format=fmt, delimiter=delimiter)
        if report.rejected:
            log.warning("%s: skipped %d malformed rows", path, report.rejected)
        records.extend(recs)
    if years:
        keep = set(years)
        records = [r for r in records if r.year in keep]
    if not records:
        raise EmptyCorpusError(
            "no records loaded" + (" for the requested years" if years else "")
        )
    return records


def _years_of(groups: dict[GroupKey, object]) -> list[int]:
    return sorted({key.year for key in groups})


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    """Normalize raw inputs into one validated line-JSON corpus."""
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records: list[PublicationRecord] = []
    diagnostics: list[tuple[int, str]] = []
    for p in args.input:
        path = Path(p)
        fmt, delimiter = _input_format(path)
        recs, report = parse_records(path, format=fmt, delimiter=delimiter)
        diagnostics.extend(
            (lineno, f"{path.name}: {reason}") for lineno, reason in report.diagnostics
        )
        records.extend(recs)

    check = validate(records)
    diagnostics.extend(check.diagnostics)
    flagged = {pos for pos, _ in check.diagnostics}
    kept = [r for pos, r in enumerate(records, start=1) if pos not in flagged]
    if args.year:
        years = set(args.year)
        kept = [r for r in kept if r.year in years]

    write_records(kept, out_dir / "corpus.jsonl", format="line-json")
    combined = IngestReport(
        accepted=len(kept), rejected=len(diagnostics), diagnostics=tuple(diagnostics)
    )
    write_diagnostics(combined, out_dir / "ingest_diagnostics.jsonl")
    if combined.rejected:
        log.warning("%d rows rejected; see ingest_diagnostics.jsonl", combined.rejected)
    print(f"accepted {combined.accepted} rejected {combined.rejected}")
    return 0


def cmd_synth(args) -> int:
    """Generate a corpus from a JSON spec; same spec + seed = same bytes."""
    spec = SynthSpec.load(args.spec)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    records = generate_corpus(spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_records(records, out_dir / "corpus.jsonl", format="line-json")
    meta = generator_metadata(spec)
    meta["spec"] = json.loads(spec.to_json())
    (out_dir / "corpus.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"generated {len(records)} records in {len(spec.fields)} fields")
    return 0


def cmd_fetch(args) -> int:
    """Resolve DOIs to reader counts; optionally merge them into a corpus."""
    if not args.input and not args.dois:
        log.error("fetch needs --input and/or --dois")
        return 2
    config = ProviderConfig(base_url=args.provider_url)
    cache = Cache(args.cache)

    corpus_records: list[PublicationRecord] | None = None
    dois: list[str] = []
    if args.input:
        corpus_records = _load_records(args.input, args.year)
        dois.extend(r.id for r in corpus_records)
    if args.dois:
        for line in Path(args.dois).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                dois.append(line)

    results = fetch_counts(dois, config, cache)
    matched = sum(1 for r in results if r.reads is not None)
    failed = sum(1 for r in results if r.error is not None)
    below = len(results) - matched - failed

    merged = 0
    if corpus_records is not None:
        by_doi = {r.doi: r for r in results}
        updated: list[PublicationRecord] = []
        for rec in corpus_records:
            res = by_doi.get(rec.id)
            if res is not None and res.reads is not None:
                updated.append(dataclasses.replace(rec, reads=res.reads))
                merged += 1
            else:
                updated.append(rec)
        if merged == 0:
            log.warning("no fetched count cleared the match threshold; corpus unchanged")
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_records(updated, out_dir / "corpus.jsonl", format="line-json")

    summary = f"resolved {len(results)} dois: {matched} matched, {below} below threshold, {failed} failed"
    if corpus_records is not None:
        summary += f", {merged} merged"
    print(summary)
    return 0


_FIT_COLUMNS = (
    "field", "year", "obs", "r0", "r_max", "sw_p", "mu", "sigma2", "loglik", "reject", "note",
)
_FIT_RENDER = {
    "year": _fmt_int, "obs": _fmt_int, "r0": _fmt1, "r_max": _fmt_num,
    "sw_p": _fmt3, "mu": _fmt3, "sigma2": _fmt3, "loglik": _fmt1, "reject": _fmt_bool,
}


def cmd_fit(args) -> int:
    """Per-stratum lognormal fits with a Bonferroni-corrected normality test."""
    policy = ZeroPolicy(ZERO_POLICY_FLAGS[args.zero_policy])
    records = _load_records(args.input, args.year)
    groups = group_by_field_year(records)
    rows: list[dict] = []
    p_values: dict[GroupKey, float] = {}
    for key in sorted(groups):
        group = groups[key]
        stats = group_stats(group)
        row: dict = {
            "field": key.field, "year": key.year, "obs": stats.n,
            "r0": stats.r_mean, "r_max": stats.r_max,
            "sw_p": None, "mu": None, "sigma2": None, "loglik": None,
            "reject": None, "note": "",
        }
        notes = []
        reads = group.reads
        try:
            fit = fit_lognormal(reads, policy)
            row.update(mu=fit.mu, sigma2=fit.sigma2, loglik=fit.loglik)
        except (DegenerateSampleError, ZeroVarianceError) as exc:
            notes.append(f"fit failed: {exc}")
        try:
            test = test_lognormality(reads, policy, alpha=args.alpha, m=1)
            row["sw_p"] = test.p
            p_values[key] = test.p
        except (DegenerateSampleError, UnsupportedSizeError, ZeroVarianceError) as exc:
            notes.append(f"normality test failed: {exc}")
        row["note"] = "; ".join(notes)
        rows.append(row)

    m = args.m if args.m is not None else max(len(p_values), 1)
    threshold = args.alpha / m
    for row in rows:
        key = GroupKey(row["field"], row["year"])
        if key in p_values:
            row["reject"] = bool(p_values[key] < threshold)

    echo = None if getattr(args, "quiet_tables", False) else args.format
    write_table(rows, _FIT_COLUMNS, _FIT_RENDER, Path(args.out), "fit", echo)
    return 0


_COLLAPSE_COLUMNS = ("year", "n_strata", "obs", "mu", "sigma2", "loglik", "note")
_COLLAPSE_RENDER = {
    "year": _fmt_int, "n_strata": _fmt_int, "obs": _fmt_int,
    "mu": _fmt3, "sigma2": _fmt3, "loglik": _fmt1,
}


def cmd_collapse(args) -> int:
    """Pool mean-rescaled strata per year; emit pooled fits and CCDF files."""
    policy = ZeroPolicy(ZERO_POLICY_FLAGS[args.zero_policy])
    records = _load_records(args.input, args.year)
    groups = group_by_field_year(records)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows: list[dict] = []
    for year in _years_of(groups):
        samples = []
        skipped = []
        for key in sorted(k for k in groups if k.year == year):
            try:
                sample = rescale_group(groups[key])
            except AllUnreadGroupError:
                log.warning("stratum %s/%d has only zero counts; skipped", key.field, year)
                skipped.append(key.field)
                continue
            samples.append(sample)
            write_ccdf_tsv(ccdf(sample.values), out_dir / ccdf_filename(year, key.field))
        row: dict = {
            "year": year, "n_strata": len(samples), "obs": None,
            "mu": None, "sigma2": None, "loglik": None, "note": "",
        }
        notes = [f"skipped all-zero strata: {', '.join(skipped)}"] if skipped else []
        if samples:
            pooled = collapse(samples)
            write_ccdf_tsv(ccdf(pooled), out_dir / ccdf_filename(year))
            row["obs"] = int(pooled.size)
            try:
                fit = fit_lognormal(pooled, policy)
                row.update(mu=fit.mu, sigma2=fit.sigma2, loglik=fit.loglik)
            except (DegenerateSampleError, ZeroVarianceError) as exc:
                notes.append(f"pooled fit failed: {exc}")
        else:
            notes.append("no usable strata")
        row["note"] = "; ".join(notes)
        rows.append(row)

    echo = None if getattr(args, "quiet_tables", False) else args.format
    write_table(rows, _COLLAPSE_COLUMNS, _COLLAPSE_RENDER, out_dir, "collapse", echo)
    return 0


def _css_class_labels(k: int) -> list[str]:
    if k + 1 <= len(CLASS_NAMES):
        return list(CLASS_NAMES[: k + 1])
    return [str(i + 1) for i in range(k + 1)]


def _css_row(head: dict, values: np.ndarray, k: int, rule: str, labels: Sequence[str]) -> dict:
    row = dict(head)
    row["obs"] = int(values.size)
    for j in range(k):
        row[f"beta{j + 1}"] = None
    for name in labels:
        row[f"count_{name}"] = None
        row[f"share_{name}"] = None
    notes = []
    try:
        betas = characteristic_scores(values, k=k, rule=rule)
        result = classify(values, betas)
    except ValueError as exc:
        row["note"] = f"scores failed: {exc}"
        return row
    for j, beta in enumerate(betas):
        row[f"beta{j + 1}"] = beta
    if len(betas) < k:
        notes.append(f"scores stopped after {len(betas)}")
    for i, (count, share) in enumerate(zip(result.class_counts, result.class_shares)):
        row[f"count_{labels[i]}"] = count
        row[f"share_{labels[i]}"] = 100.0 * share
    row["note"] = "; ".join(notes)
    return row


def cmd_css(args) -> int:
    """Characteristic-score classes, pooled per year and per stratum."""
    records = _load_records(args.input, args.year)
    groups = group_by_field_year(records)
    k, rule = args.k, args.css_strict
    labels = _css_class_labels(k)
    columns = (
        ["year", "obs"]
        + [f"beta{j + 1}" for j in range(k)]
        + [f"count_{name}" for name in labels]
        + [f"share_{name}" for name in labels]
        + ["note"]
    )
    render: dict[str, Callable] = {"year": _fmt_int, "obs": _fmt_int}
    for j in range(k):
        render[f"beta{j + 1}"] = _fmt1
    for name in labels:
        render[f"count_{name}"] = _fmt_int
        render[f"share_{name}"] = _fmt1

    overall_rows = []
    for year in _years_of(groups):
        keys = sorted(key for key in groups if key.year == year)
        values = np.concatenate([np.asarray(groups[key].reads, dtype=float) for key in keys])
        overall_rows.append(_css_row({"year": year}, values, k, rule, labels))

    strata_rows = [
        _css_row(
            {"field": key.field, "year": key.year},
            np.asarray(groups[key].reads, dtype=float),
            k, rule, labels,
        )
        for key in sorted(groups)
    ]

    echo = None if getattr(args, "quiet_tables", False) else args.format
    out_dir = Path(args.out)
    write_table(overall_rows, columns, render, out_dir, "css_overall", echo)
    write_table(strata_rows, ["field"] + columns, render, out_dir, "css_strata", echo)
    return 0


_TOPZ_COLUMNS = ("year", "z", "variant", "n_fields", "sigma_z", "within_tolerance", "note")
_TOPZ_RENDER = {
    "year": _fmt_int, "z": _fmt_num, "n_fields": _fmt_int,
    "sigma_z": _fmt3, "within_tolerance": _fmt_int,
}
_SHARE_COLUMNS = ("field", "n", "share", "lower", "upper", "inside")
_SHARE_RENDER = {
    "n": _fmt_int, "share": _fmt2, "lower": _fmt2, "upper": _fmt2, "inside": _fmt_bool,
}


def cmd_topz(args) -> int:
    """Per-field share of the global top z%, before and after rescaling."""
    zs = tuple(args.z) if args.z else DEFAULT_Z
    records = _load_records(args.input, args.year)
    groups = group_by_field_year(records)
    out_dir = Path(args.out)
    echo = None if getattr(args, "quiet_tables", False) else args.format

    rows: list[dict] = []
    for year in _years_of(groups):
        year_records = [r for r in records if r.year == year]
        for z in zs:
            for variant in VARIANTS:
                head = {"year": year, "z": z, "variant": variant}
                try:
                    report = top_share_report(year_records, z, variant, args.tie_rule)
                except ValueError as exc:
                    log.warning("topz %d z=%g %s: %s", year, z, variant, exc)
                    rows.append({**head, "n_fields": None, "sigma_z": None,
                                 "within_tolerance": None, "note": str(exc)})
                    continue
                rows.append({**head, "n_fields": report.n_c, "sigma_z": report.sigma_z,
                             "within_tolerance": report.within_tolerance, "note": ""})
                share_rows = [
                    {
                        "field": field,
                        "n": report.n_i[field],
                        "share": share,
                        "lower": z - report.sigma_z,
                        "upper": z + report.sigma_z,
                        "inside": abs(share - z) <= report.sigma_z,
                    }
                    for field, share in sorted(report.per_field_share.items())
                ]
                write_table(
                    share_rows, _SHARE_COLUMNS, _SHARE_RENDER, out_dir,
                    f"topz_shares_{year}_z{z:g}_{variant}", None,
                )

    write_table(rows, _TOPZ_COLUMNS, _TOPZ_RENDER, out_dir, "topz", echo)
    return 0


def cmd_report(args) -> int:
    """fit + collapse + css + topz over the same corpus and flags."""
    args.quiet_tables = True
    code = 0
    for command in (cmd_fit, cmd_collapse, cmd_css, cmd_topz):
        code = max(code, command(args))
    print(f"report written to {args.out}")
    return code


# ---------------------------------------------------------------------------
# parser


def _add_io_options(p: argparse.ArgumentParser, input_required: bool = True) -> None:
    p.add_argument(
        "--input", action="append", required=input_required, metavar="PATH",
        help="corpus file (.csv, .tsv or .jsonl by extension); repeatable",
    )
    p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
    p.add_argument(
        "--year", action="append", type=int, metavar="YYYY",
        help="restrict to this publication year; repeatable",
    )


def _add_table_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format", choices=("tsv", "jsonl"), default="tsv",
        help="stdout rendering; both file formats are always written",
    )


def _add_fit_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--zero-policy", choices=tuple(ZERO_POLICY_FLAGS), default="exclude",
        help="zero counts: drop them (exclude) or shift the sample by one (shift1)",
    )
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument(
        "--m", type=int, default=None, metavar="M",
        help="hypothesis-family size for the Bonferroni correction "
        "(default: number of strata actually tested)",
    )


def _add_css_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=3, help="number of characteristic scores (default 3)")
    p.add_argument(
        "--css-strict", choices=TRUNCATION_RULES, default="ge",
        help="truncation rule: subsample at-or-above (ge) or strictly above (gt) the last score",
    )


def _add_topz_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--z", action="append", type=float, metavar="Z",
        help="top percentage to analyse, in (0, 100); repeatable (default: 5 10 20)",
    )
    p.add_argument(
        "--tie-rule", choices=TIE_RULES, default="rank",
        help="cut ties by rank (exactly floor(zN/100) selected) or admit all at the threshold",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="readscale",
        description="Readership-count distributions across fields: fits, rescaling, "
        "collapse diagnostics, characteristic scores and top-z% shares.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="validate and normalize raw corpus files")
    _add_io_options(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus from a JSON spec")
    p.add_argument("--spec", required=True, metavar="PATH", help="synthesis spec (JSON)")
    p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fetch", help="resolve DOIs to reader counts via a provider endpoint")
    _add_io_options(p, input_required=False)
    p.add_argument("--provider-url", required=True, metavar="URL", help="provider base URL")
    p.add_argument("--cache", required=True, metavar="PATH", help="line-JSON result cache")
    p.add_argument("--dois", metavar="PATH", help="extra DOIs to resolve, one per line")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("fit", help="per-stratum lognormal fits and normality tests")
    _add_io_options(p)
    _add_table_options(p)
    _add_fit_options(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("collapse", help="pool rescaled strata per year; pooled fits and CCDFs")
    _add_io_options(p)
    _add_table_options(p)
    _add_fit_options(p)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("css", help="characteristic scores and class shares")
    _add_io_options(p)
    _add_table_options(p)
    _add_css_options(p)
    p.set_defaults(func=cmd_css)

    p = sub.add_parser("topz", help="per-field share of the global top z%%")
    _add_io_options(p)
    _add_table_options(p)
    _add_topz_options(p)
    p.set_defaults(func=cmd_topz)

    p = sub.add_parser("report", help="run fit, collapse, css and topz together")
    _add_io_options(p)
    _add_table_options(p)
    _add_fit_options(p)
    _add_css_options(p)
    _add_topz_options(p)
    p.set_defaults(func=cmd_report)

    return parser


def _validate_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if getattr(args, "z", None):
        for z in args.z:
            if not 0.0 < z < 100.0:
                parser.error(f"--z must lie in (0, 100), got {z:g}")
    alpha = getattr(args, "alpha", None)
    if alpha is not None and not 0.0 < alpha < 1.0:
        parser.error(f"--alpha must lie in (0, 1), got {alpha:g}")
    m = getattr(args, "m", None)
    if m is not None and m < 1:
        parser.error(f"--m must be >= 1, got {m}")
    k = getattr(args, "k", None)
    if k is not None and k < 1:
        parser.error(f"--k must be >= 1, got {k}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    _validate_args(parser, args)
    try:
        return args.func(args)
    except (IngestError, EmptyCorpusError, DuplicateIdError, FetchError) as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 1
    except ValueError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
