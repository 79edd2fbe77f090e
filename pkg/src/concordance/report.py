"""Test execution and report formatting.

The report keeps every statistic as an exact rational; the JSON rendering
carries numerator/denominator next to a fixed-precision decimal so that
nothing is lost on the wire.  Text output contains no timing line and is
therefore byte-stable for identical inputs, flags and seed.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .coefficient import DisorderResult, disorder
from .errors import ConfigurationError
from .exact import (
    DEFAULT_BUDGET,
    PValueResult,
    exact_kw_pvalue,
    exact_pvalue,
    load_or_enumerate,
)
from .groups import Arrangement, GroupSizes
from .kruskal import KwResult, kruskal_wallis
from .montecarlo import McEstimate, mc_pvalue

REPORT_FORMAT_VERSION = 1

P_DECIMALS = 7
TAU_DECIMALS = 4
KW_DECIMALS = 4


@dataclass(frozen=True)
class TestOptions:
    """Options controlling which statistics and p-values to compute."""

    __test__ = False  # keep pytest from collecting the Test* name

    statistic: str | None = None  # None = both; "disorder"/"tau" or "kw" restrict
    pvalue: str = "exact"  # "exact" | "montecarlo" | "none"
    samples: int = 100_000
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    cache_dir: str | None = None
    workers: int | None = None

    def wants_concordance(self) -> bool:
        return self.statistic in (None, "disorder", "tau")

    def wants_kw(self) -> bool:
        return self.statistic in (None, "kw")


@dataclass(frozen=True)
class ConcordanceSection:
    result: DisorderResult
    closest_order_labels: tuple[str, ...]
    p_exact: PValueResult | None
    p_montecarlo: McEstimate | None


@dataclass(frozen=True)
class KwSection:
    result: KwResult
    p_exact: PValueResult | None


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # keep pytest from collecting the Test* name

    labels: tuple[str, ...]
    sizes: tuple[int, ...]
    n: int
    tie_block_count: int
    tied_observation_count: int
    concordance: ConcordanceSection | None
    kw: KwSection | None
    warnings: tuple[str, ...]
    timing_seconds: float


def run_test(
    labels: tuple[str, ...],
    sizes: GroupSizes,
    arrangement: Arrangement,
    options: TestOptions,
) -> TestReport:
    """Compute the requested statistics and p-values for one dataset."""
    if options.pvalue not in ("exact", "montecarlo", "none"):
        raise ConfigurationError(
            f"--pvalue must be exact, montecarlo or none, got {options.pvalue!r}"
        )
    start = time.perf_counter()
    warnings: list[str] = []
    tie_blocks = arrangement.tie_block_sizes()
    has_ties = bool(tie_blocks)

    concordance = None
    if options.wants_concordance():
        result = disorder(arrangement, sizes)
        p_exact = None
        p_mc = None
        if result.degenerate:
            warnings.append(
                f"maximum disorder is 0 for sizes {sizes.sizes}: every arrangement "
                "is fully concordant, tau is reported as 1 by convention and the "
                "p-value is skipped"
            )
        elif options.pvalue == "exact":
            dist = load_or_enumerate(
                sizes,
                "disorder",
                options.cache_dir,
                workers=options.workers,
                budget=options.budget,
            )
            p_exact = exact_pvalue(sizes, result.disorder, distribution=dist)
            if has_ties:
                warnings.append(
                    "exact p-value tests the tied disorder against the tie-free "
                    "null distribution; a tie-conditioned Monte Carlo p-value is "
                    "reported alongside"
                )
                p_mc = mc_pvalue(
                    arrangement,
                    sizes,
                    options.samples,
                    options.seed,
                    workers=options.workers,
                )
        elif options.pvalue == "montecarlo":
            p_mc = mc_pvalue(
                arrangement,
                sizes,
                options.samples,
                options.seed,
                workers=options.workers,
            )
        concordance = ConcordanceSection(
            result=result,
            closest_order_labels=tuple(labels[g] for g in result.closest_order),
            p_exact=p_exact,
            p_montecarlo=p_mc,
        )

    kw = None
    if options.wants_kw():
        kw_result = kruskal_wallis(arrangement, sizes)
        kw_p = None
        if options.pvalue == "exact":
            if has_ties:
                warnings.append(
                    "exact KW null distribution is only available for tie-free "
                    "data; KW p-value omitted"
                )
            else:
                kw_dist = load_or_enumerate(
                    sizes,
                    "kw",
                    options.cache_dir,
                    workers=options.workers,
                    budget=options.budget,
                )
                kw_p = exact_kw_pvalue(sizes, kw_result.kw, distribution=kw_dist)
        elif options.pvalue == "montecarlo":
            warnings.append(
                "Monte Carlo p-values cover the disorder statistic only; "
                "KW p-value omitted"
            )
        if has_ties:
            warnings.append(
                "tie-corrected KW uses the cubic correction "
                "1 - sum(t_i^3 - t_i)/(n^3 - n); published values based on other "
                "corrections will differ"
            )
        kw = KwSection(result=kw_result, p_exact=kw_p)

    return TestReport(
        labels=labels,
        sizes=sizes.sizes,
        n=sizes.n,
        tie_block_count=len(tie_blocks),
        tied_observation_count=sum(tie_blocks),
        concordance=concordance,
        kw=kw,
        warnings=tuple(warnings),
        timing_seconds=time.perf_counter() - start,
    )


# --- rendering ----------------------------------------------------------------

def _decimal(value: Fraction, places: int) -> str:
    return f"{float(value):.{places}f}"


def _rat(value: Fraction, places: int) -> dict:
    value = Fraction(value)
    return {
        "num": value.numerator,
        "den": value.denominator,
        "decimal": _decimal(value, places),
    }


def _halfstr(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{float(value):g}"


def to_json_dict(report: TestReport) -> dict:
    out: dict = {
        "report": "concordance-test",
        "format_version": REPORT_FORMAT_VERSION,
        "labels": list(report.labels),
        "sizes": list(report.sizes),
        "n": report.n,
        "ties": {
            "blocks": report.tie_block_count,
            "observations": report.tied_observation_count,
        },
        "concordance": None,
        "kruskal_wallis": None,
        "warnings": list(report.warnings),
        "timing_seconds": report.timing_seconds,
    }
    if report.concordance is not None:
        c = report.concordance
        section = {
            "disorder": _rat(c.result.disorder, 1),
            "max_disorder": c.result.max_disorder,
            "total_pairs": c.result.total_pairs,
            "tau": _rat(c.result.tau, TAU_DECIMALS),
            "degenerate": c.result.degenerate,
            "closest_order": list(c.closest_order_labels),
            "p_exact": None,
            "p_montecarlo": None,
        }
        if c.p_exact is not None:
            section["p_exact"] = {
                "p": _rat(c.p_exact.p_value, P_DECIMALS),
                "direction": c.p_exact.direction,
                "method": c.p_exact.method,
                "total_enumerated": c.p_exact.total_enumerated,
            }
        if c.p_montecarlo is not None:
            mc = c.p_montecarlo
            section["p_montecarlo"] = {
                "p_hat": mc.p_hat,
                "ci_low": mc.ci_low,
                "ci_high": mc.ci_high,
                "samples": mc.samples,
                "seed": mc.seed,
                "exceed_count": mc.exceed_count,
                "direction": "disorder<=observed",
                "method": "montecarlo",
            }
        out["concordance"] = section
    if report.kw is not None:
        kw = report.kw
        section = {
            "kw": _rat(kw.result.kw, KW_DECIMALS),
            "kw_tie_corrected": (
                None
                if kw.result.kw_tie_corrected is None
                else _rat(kw.result.kw_tie_corrected, KW_DECIMALS)
            ),
            "rank_sums": [_rat(r, 1) for r in kw.result.rank_sums],
            "mean_ranks": [_rat(r, 4) for r in kw.result.mean_ranks],
            "tie_counts": list(kw.result.tie_counts),
            "p_exact": None,
        }
        if kw.p_exact is not None:
            section["p_exact"] = {
                "p": _rat(kw.p_exact.p_value, P_DECIMALS),
                "direction": kw.p_exact.direction,
                "method": kw.p_exact.method,
                "total_enumerated": kw.p_exact.total_enumerated,
            }
        out["kruskal_wallis"] = section
    return out


def render_text(report: TestReport) -> str:
    lines: list[str] = []
    groups = "  ".join(
        f"{lab}={s}" for lab, s in zip(report.labels, report.sizes)
    )
    lines.append("input")
    lines.append(f"  groups         {groups}")
    lines.append(f"  observations   {report.n}")
    if report.tie_block_count:
        lines.append(
            f"  ties           {report.tie_block_count} blocks "
            f"({report.tied_observation_count} observations)"
        )
    else:
        lines.append("  ties           none")
    if report.concordance is not None:
        c = report.concordance
        lines.append("concordance")
        lines.append(
            f"  disorder       {_halfstr(c.result.disorder)}"
            f"   (max {c.result.max_disorder}, {c.result.total_pairs} cross-group pairs)"
        )
        tau_line = f"  tau            {_decimal(c.result.tau, TAU_DECIMALS)}"
        if c.result.degenerate:
            tau_line += "   (degenerate: max disorder is 0)"
        lines.append(tau_line)
        lines.append(
            "  closest order  " + " ".join(c.closest_order_labels)
        )
        if c.p_exact is not None:
            lines.append(
                f"  p (exact)      {_decimal(c.p_exact.p_value, P_DECIMALS)}"
                f"   P[disorder <= {_halfstr(c.p_exact.statistic_value)}], "
                f"{c.p_exact.total_enumerated} arrangements"
            )
        if c.p_montecarlo is not None:
            mc = c.p_montecarlo
            lines.append(
                f"  p (montecarlo) {mc.p_hat:.{P_DECIMALS}f}"
                f"   95% CI [{mc.ci_low:.{P_DECIMALS}f}, {mc.ci_high:.{P_DECIMALS}f}], "
                f"{mc.samples} samples, seed {mc.seed}"
            )
    if report.kw is not None:
        kw = report.kw
        lines.append("kruskal-wallis")
        lines.append(f"  statistic      {_decimal(kw.result.kw, KW_DECIMALS)}")
        if kw.result.kw_tie_corrected is not None:
            lines.append(
                f"  tie corrected  {_decimal(kw.result.kw_tie_corrected, KW_DECIMALS)}"
            )
        sums = "  ".join(
            f"{lab}={_halfstr(r)}"
            for lab, r in zip(report.labels, kw.result.rank_sums)
        )
        lines.append(f"  rank sums      {sums}")
        if kw.p_exact is not None:
            lines.append(
                f"  p (exact)      {_decimal(kw.p_exact.p_value, P_DECIMALS)}"
                f"   P[KW >= observed], {kw.p_exact.total_enumerated} arrangements"
            )
    if report.warnings:
        lines.append("warnings")
        for w in report.warnings:
            lines.append(f"  - {w}")
    return "\n".join(lines) + "\n"


def render_csv(report: TestReport) -> str:
    """Flat field,value rows; rationals as num/den pairs plus decimals."""
    rows: list[tuple[str, str]] = []
    rows.append(("labels", " ".join(report.labels)))
    rows.append(("sizes", " ".join(str(s) for s in report.sizes)))
    rows.append(("n", str(report.n)))
    rows.append(("tie_blocks", str(report.tie_block_count)))
    rows.append(("tied_observations", str(report.tied_observation_count)))
    if report.concordance is not None:
        c = report.concordance
        d = Fraction(c.result.disorder)
        rows.append(("disorder", f"{d.numerator}/{d.denominator}"))
        rows.append(("disorder_decimal", _halfstr(d)))
        rows.append(("max_disorder", str(c.result.max_disorder)))
        rows.append(("total_pairs", str(c.result.total_pairs)))
        tau = Fraction(c.result.tau)
        rows.append(("tau", f"{tau.numerator}/{tau.denominator}"))
        rows.append(("tau_decimal", _decimal(tau, TAU_DECIMALS)))
        rows.append(("degenerate", str(c.result.degenerate).lower()))
        rows.append(("closest_order", " ".join(c.closest_order_labels)))
        if c.p_exact is not None:
            p = c.p_exact.p_value
            rows.append(("p_exact", f"{p.numerator}/{p.denominator}"))
            rows.append(("p_exact_decimal", _decimal(p, P_DECIMALS)))
        if c.p_montecarlo is not None:
            mc = c.p_montecarlo
            rows.append(("p_montecarlo", f"{mc.p_hat:.{P_DECIMALS}f}"))
            rows.append(("p_montecarlo_ci", f"{mc.ci_low:.{P_DECIMALS}f}..{mc.ci_high:.{P_DECIMALS}f}"))
            rows.append(("p_montecarlo_samples", str(mc.samples)))
            rows.append(("p_montecarlo_seed", str(mc.seed)))
    if report.kw is not None:
        kw = report.kw
        v = Fraction(kw.result.kw)
        rows.append(("kw", f"{v.numerator}/{v.denominator}"))
        rows.append(("kw_decimal", _decimal(v, KW_DECIMALS)))
        if kw.result.kw_tie_corrected is not None:
            t = Fraction(kw.result.kw_tie_corrected)
            rows.append(("kw_tie_corrected", f"{t.numerator}/{t.denominator}"))
            rows.append(("kw_tie_corrected_decimal", _decimal(t, KW_DECIMALS)))
        rows.append(
            ("kw_rank_sums", " ".join(_halfstr(r) for r in kw.result.rank_sums))
        )
        if kw.p_exact is not None:
            p = kw.p_exact.p_value
            rows.append(("kw_p_exact", f"{p.numerator}/{p.denominator}"))
            rows.append(("kw_p_exact_decimal", _decimal(p, P_DECIMALS)))
    for i, w in enumerate(report.warnings):
        rows.append((f"warning_{i}", w))
    out = ["field,value"]
    for field, value in rows:
        if "," in value or '"' in value:
            value = '"' + value.replace('"', '""') + '"'
        out.append(f"{field},{value}")
    return "\n".join(out) + "\n"


_RATIONAL_SCHEMA = {
    "type": "object",
    "properties": {
        "num": {"type": "integer"},
        "den": {"type": "integer", "exclusiveMinimum": 0},
        "decimal": {"type": "string"},
    },
    "required": ["num", "den", "decimal"],
    "additionalProperties": False,
}

_P_EXACT_SCHEMA = {
    "type": ["object", "null"],
    "properties": {
        "p": _RATIONAL_SCHEMA,
        "direction": {"type": "string"},
        "method": {"const": "exact"},
        "total_enumerated": {"type": "integer", "minimum": 1},
    },
    "required": ["p", "direction", "method", "total_enumerated"],
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "concordance test report",
    "type": "object",
    "properties": {
        "report": {"const": "concordance-test"},
        "format_version": {"const": REPORT_FORMAT_VERSION},
        "labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "n": {"type": "integer", "minimum": 1},
        "ties": {
            "type": "object",
            "properties": {
                "blocks": {"type": "integer", "minimum": 0},
                "observations": {"type": "integer", "minimum": 0},
            },
            "required": ["blocks", "observations"],
            "additionalProperties": False,
        },
        "concordance": {
            "type": ["object", "null"],
            "properties": {
                "disorder": _RATIONAL_SCHEMA,
                "max_disorder": {"type": "integer", "minimum": 0},
                "total_pairs": {"type": "integer", "minimum": 0},
                "tau": _RATIONAL_SCHEMA,
                "degenerate": {"type": "boolean"},
                "closest_order": {"type": "array", "items": {"type": "string"}},
                "p_exact": _P_EXACT_SCHEMA,
                "p_montecarlo": {
                    "type": ["object", "null"],
                    "properties": {
                        "p_hat": {"type": "number"},
                        "ci_low": {"type": "number"},
                        "ci_high": {"type": "number"},
                        "samples": {"type": "integer", "minimum": 1},
                        "seed": {"type": "integer"},
                        "exceed_count": {"type": "integer", "minimum": 0},
                        "direction": {"type": "string"},
                        "method": {"const": "montecarlo"},
                    },
                    "required": ["p_hat", "ci_low", "ci_high", "samples", "seed"],
                    "additionalProperties": False,
                },
            },
            "required": [
                "disorder",
                "max_disorder",
                "total_pairs",
                "tau",
                "degenerate",
                "closest_order",
            ],
            "additionalProperties": False,
        },
        "kruskal_wallis": {
            "type": ["object", "null"],
            "properties": {
                "kw": _RATIONAL_SCHEMA,
                "kw_tie_corrected": {
                    "anyOf": [{"type": "null"}, _RATIONAL_SCHEMA]
                },
                "rank_sums": {"type": "array", "items": _RATIONAL_SCHEMA},
                "mean_ranks": {"type": "array", "items": _RATIONAL_SCHEMA},
                "tie_counts": {"type": "array", "items": {"type": "integer"}},
                "p_exact": _P_EXACT_SCHEMA,
            },
            "required": ["kw", "kw_tie_corrected", "rank_sums", "mean_ranks"],
            "additionalProperties": False,
        },
        "warnings": {"type": "array", "items": {"type": "string"}},
        "timing_seconds": {"type": "number", "minimum": 0},
    },
    "required": [
        "report",
        "format_version",
        "labels",
        "sizes",
        "n",
        "ties",
        "concordance",
        "kruskal_wallis",
        "warnings",
        "timing_seconds",
    ],
    "additionalProperties": False,
}
