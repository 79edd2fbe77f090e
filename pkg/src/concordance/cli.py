"""Command-line interface: test, dist, tables and compare.

Exit codes: 0 success, 2 input or configuration error, 3 capacity error,
4 degenerate statistic.  Worker count comes from CONCORDANCE_WORKERS
(default: all CPUs); output never depends on it.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .coefficient import max_disorder
from .errors import (
    CapacityError,
    ConcordanceError,
    ConfigurationError,
    DegenerateStatisticError,
    InputDataError,
)
from .exact import DEFAULT_BUDGET, ExactDistribution, critical_values, load_or_enumerate
from .groups import GroupSizes
from .ingest import ingest_path
from .kruskal import kw_attainable_max
from .montecarlo import mc_distribution
from .report import TestOptions, render_csv, render_text, run_test, to_json_dict

PROB_DECIMALS = 5
TAU_DECIMALS = 4

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_DEGENERATE = 4


def _parse_sizes(text: str) -> GroupSizes:
    try:
        parts = tuple(int(p) for p in text.split(",") if p.strip() != "")
    except ValueError as exc:
        raise InputDataError(f"--sizes expects comma-separated integers, got {text!r}") from exc
    if not parts:
        raise InputDataError("--sizes is empty")
    return GroupSizes(parts)


def _parse_alphas(text: str) -> tuple[Fraction, ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            alpha = Fraction(part)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputDataError(f"bad significance level {part!r}") from exc
        if not 0 < alpha < 1:
            raise InputDataError(f"significance level {part} is not in (0, 1)")
        out.append(alpha)
    if not out:
        raise InputDataError("--alpha is empty")
    return tuple(out)


def _prob(p: Fraction) -> str:
    return f"{float(p):.{PROB_DECIMALS}f}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concordance",
        description=(
            "Concordance coefficient test for k unrelated samples, with exact "
            "and Monte Carlo null distributions and a Kruskal-Wallis comparison."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the test on a data file")
    p_test.add_argument("input", help="CSV file with a group,value header, or - for stdin")
    p_test.add_argument(
        "--pre-ranked",
        action="store_true",
        help="input is a label sequence with (..) tie groups instead of CSV",
    )
    p_test.add_argument(
        "--statistic",
        choices=["disorder", "tau", "kw"],
        default=None,
        help="restrict the report to one statistic (default: both)",
    )
    p_test.add_argument(
        "--pvalue",
        choices=["exact", "montecarlo", "none"],
        default="exact",
        help="p-value method (default: exact)",
    )
    p_test.add_argument("--samples", type=int, default=100_000)
    p_test.add_argument("--seed", type=int, default=0)
    p_test.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p_test.add_argument("--cache-dir", default=None)
    p_test.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p_test.set_defaults(func=cmd_test)

    p_dist = sub.add_parser("dist", help="print an exact null distribution")
    p_dist.add_argument("--sizes", required=True, help="comma-separated group sizes")
    p_dist.add_argument(
        "--statistic", choices=["disorder", "tau", "kw"], default="disorder"
    )
    p_dist.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p_dist.add_argument("--cache-dir", default=None)
    p_dist.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p_dist.set_defaults(func=cmd_dist)

    p_tables = sub.add_parser("tables", help="print critical-value tables")
    p_tables.add_argument(
        "--sizes",
        action="append",
        required=True,
        help="comma-separated group sizes; repeat for several tables",
    )
    p_tables.add_argument("--alpha", default="0.10,0.05,0.01")
    p_tables.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p_tables.add_argument("--cache-dir", default=None)
    p_tables.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p_tables.set_defaults(func=cmd_tables)

    p_cmp = sub.add_parser(
        "compare",
        help="emit paired disorder/KW distribution data for plotting",
    )
    p_cmp.add_argument("--sizes", required=True)
    p_cmp.add_argument("--samples", type=int, default=100_000)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--normalize-kw", action="store_true")
    p_cmp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p_cmp.add_argument("--cache-dir", default=None)
    p_cmp.add_argument("--format", choices=["csv", "json"], default="csv")
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def cmd_test(args: argparse.Namespace) -> int:
    data = ingest_path(args.input, pre_ranked=args.pre_ranked)
    options = TestOptions(
        statistic=args.statistic,
        pvalue=args.pvalue,
        samples=args.samples,
        seed=args.seed,
        budget=args.budget,
        cache_dir=args.cache_dir,
    )
    report = run_test(data.labels, data.sizes, data.arrangement, options)
    if args.format == "json":
        print(json.dumps(to_json_dict(report), indent=2))
    elif args.format == "csv":
        sys.stdout.write(render_csv(report))
    else:
        sys.stdout.write(render_text(report))
    return EXIT_OK


def _dist_rows(dist: ExactDistribution, statistic: str, sizes: GroupSizes):
    """Rows for dist output; disorder/tau carry both columns."""
    if statistic == "kw":
        return [(v, c, Fraction(c, dist.total)) for v, c in zip(dist.support, dist.counts)]
    md = max_disorder(sizes)
    rows = []
    for v, c in zip(dist.support, dist.counts):
        tau = Fraction(1) if md == 0 else 1 - v / md
        rows.append((v, tau, c, Fraction(c, dist.total)))
    if statistic == "tau":
        rows.sort(key=lambda r: r[1])
    return rows


def cmd_dist(args: argparse.Namespace) -> int:
    sizes = _parse_sizes(args.sizes)
    engine_stat = "kw" if args.statistic == "kw" else "disorder"
    dist = load_or_enumerate(
        sizes, engine_stat, args.cache_dir, budget=args.budget
    )
    rows = _dist_rows(dist, args.statistic, sizes)
    if args.format == "json":
        payload = dist.to_payload()
        payload["display_statistic"] = args.statistic
        payload["probabilities"] = [_prob(Fraction(c, dist.total)) for c in dist.counts]
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    lines = []
    if args.statistic == "kw":
        header = ("kw", "count", "probability")
        if args.format == "csv":
            lines.append(",".join(header))
            for v, c, p in rows:
                lines.append(f"{float(v)!r},{c},{_prob(p)}")
        else:
            lines.append(
                f"kw distribution for sizes {','.join(map(str, sizes.sizes))}"
                f" ({dist.total} arrangements)"
            )
            lines.append(f"{'kw':>8}  {'count':>8}  probability")
            for v, c, p in rows:
                lines.append(f"{float(v):>8.2f}  {c:>8}  {_prob(p)}")
    else:
        header = ("disorder", "tau", "count", "probability")
        if args.format == "csv":
            lines.append(",".join(header))
            for v, tau, c, p in rows:
                lines.append(f"{_halfnum(v)},{float(tau):.{TAU_DECIMALS}f},{c},{_prob(p)}")
        else:
            lines.append(
                f"{args.statistic} distribution for sizes "
                f"{','.join(map(str, sizes.sizes))} ({dist.total} arrangements)"
            )
            lines.append(f"{'disorder':>8}  {'tau':>6}  {'count':>8}  probability")
            for v, tau, c, p in rows:
                lines.append(
                    f"{_halfnum(v):>8}  {float(tau):>6.{TAU_DECIMALS}f}  {c:>8}  {_prob(p)}"
                )
    print("\n".join(lines))
    return EXIT_OK


def _halfnum(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{float(v):g}"


def cmd_tables(args: argparse.Namespace) -> int:
    alphas = _parse_alphas(args.alpha)
    all_sizes = [_parse_sizes(s) for s in args.sizes]
    json_out = []
    lines = []
    if args.format == "csv":
        lines.append("sizes,alpha,critical_disorder,attained_p")
    for sizes in all_sizes:
        dist = load_or_enumerate(
            sizes, "disorder", args.cache_dir, budget=args.budget
        )
        rows = critical_values(sizes, alphas, distribution=dist)
        key = ",".join(map(str, sizes.sizes))
        if args.format == "json":
            json_out.append(
                {
                    "sizes": list(sizes.sizes),
                    "total": dist.total,
                    "rows": [
                        {
                            "alpha": f"{float(r.alpha):g}",
                            "critical_disorder": (
                                None if r.critical is None else _halfnum(r.critical)
                            ),
                            "attained_p": (
                                None
                                if r.attained is None
                                else {
                                    "num": r.attained.numerator,
                                    "den": r.attained.denominator,
                                    "decimal": f"{float(r.attained):.7f}",
                                }
                            ),
                        }
                        for r in rows
                    ],
                }
            )
        elif args.format == "csv":
            for r in rows:
                crit = "" if r.critical is None else _halfnum(r.critical)
                att = "" if r.attained is None else f"{float(r.attained):.7f}"
                lines.append(f"{key.replace(',', ';')},{float(r.alpha):g},{crit},{att}")
        else:
            lines.append(
                f"critical values for sizes {key} ({dist.total} arrangements)"
            )
            lines.append(f"{'alpha':>6}  {'critical disorder':>17}  attained p")
            for r in rows:
                if r.critical is None:
                    lines.append(f"{float(r.alpha):>6g}  {'unattainable':>17}  -")
                else:
                    lines.append(
                        f"{float(r.alpha):>6g}  {_halfnum(r.critical):>17}  "
                        f"{float(r.attained):.7f}"
                    )
            lines.append("")
    if args.format == "json":
        print(json.dumps(json_out, indent=2))
    else:
        print("\n".join(lines).rstrip("\n"))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    sizes = _parse_sizes(args.sizes)
    exact = sizes.multinomial() <= args.budget
    meta: dict = {
        "sizes": list(sizes.sizes),
        "method": "exact" if exact else "montecarlo",
        "kw_normalized": bool(args.normalize_kw),
    }
    if exact:
        ddist = load_or_enumerate(sizes, "disorder", args.cache_dir, budget=args.budget)
        kdist = load_or_enumerate(sizes, "kw", args.cache_dir, budget=args.budget)
        d_pairs = list(zip(ddist.support, ddist.probabilities()))
        k_pairs = list(zip(kdist.support, kdist.probabilities()))
    else:
        meta["samples"] = args.samples
        meta["seed"] = args.seed
        dmc = mc_distribution(sizes, "disorder", args.samples, args.seed)
        kmc = mc_distribution(
            sizes, "kw", args.samples, args.seed, normalize_kw=args.normalize_kw
        )
        d_pairs = list(zip(dmc.values, dmc.frequencies()))
        k_pairs = list(zip(kmc.values, kmc.frequencies()))
    md = max_disorder(sizes)
    if md == 0:
        raise DegenerateStatisticError(
            f"tau is undefined for sizes {sizes.sizes}: maximum disorder is 0"
        )
    conc = {(1 - d / md): p for d, p in d_pairs}
    if exact and args.normalize_kw:
        top = kw_attainable_max(sizes)
        k_pairs = [(v / top, p) for v, p in k_pairs]
    kw_series = dict(k_pairs)
    xs = sorted(set(conc) | set(kw_series))
    if args.format == "json":
        payload = dict(meta)
        payload["rows"] = [
            [
                float(x),
                None if x not in conc else float(conc[x]),
                None if x not in kw_series else float(kw_series[x]),
            ]
            for x in xs
        ]
        payload["columns"] = [
            "statistic_value_normalized",
            "concordance_density",
            "kw_density",
        ]
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    lines = [f"# {k}={_meta_str(v)}" for k, v in sorted(meta.items())]
    lines.append("statistic_value_normalized,concordance_density,kw_density")
    for x in xs:
        cd = "" if x not in conc else repr(float(conc[x]))
        kd = "" if x not in kw_series else repr(float(kw_series[x]))
        lines.append(f"{float(x)!r},{cd},{kd}")
    print("\n".join(lines))
    return EXIT_OK


def _meta_str(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ",".join(map(str, v))
    return str(v)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputDataError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DegenerateStatisticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConcordanceError as exc:  # fallback for anything unmapped
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
