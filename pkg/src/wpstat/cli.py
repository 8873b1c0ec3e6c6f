"""Command-line driver: ``wpstat <command> [flags]``.

Every command writes one table (CSV or JSON) with a metadata header. Exit
codes: 0 success, 1 numerical failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, fixtures
from .fourier_pairs import FAMILIES, TestFunctionPair
from .goe_reference import GOEConvergenceError, GOEMCConfig, sample_goe_variance, sigma2_goe_closed_form
from .io import read_eigenvalues, read_length_spectrum
from .kernels import KernelParams
from .quadrature import QuadratureError
from .trace_stats import CLASSES, n_osc_by_class, statistic_from_eigenvalues, weyl_main_term
from .wp_asymptotics import (
    decay_study_If,
    expectation_sns_finite_g,
    expectation_terms,
    limiting_variance,
    variance_tau0,
)

__all__ = ["RunConfig", "UsageError", "parse_args", "run", "main", "COLUMNS", "OUTPUT_DIR_ENV"]

COMMANDS = ("goe-closed", "goe-mc", "expectation", "variance", "decay-study", "convergence-study", "trace-eval")
OUTPUT_DIR_ENV = "WPSTAT_OUTPUT_DIR"

COLUMNS = {
    "goe-closed": ("family", "beta", "sigma2_goe"),
    "goe-mc": ("family", "beta", "dim", "samples", "seed", "estimate", "std_error", "closed_form", "abs_diff"),
    "expectation": ("L", "tau", "I_f", "k1_term", "k2_term", "floor", "remainder_bound",
                    "genus", "envelope_c", "sns_central", "sns_half_width"),
    "variance": ("L", "tau", "normalization", "k_budget", "goe_term", "diag_correction",
                 "offdiag_term", "total", "variance", "tail_bound"),
    "decay-study": ("tau", "I_f", "oscillating", "floor"),
    "convergence-study": ("L", "tau", "normalization", "total", "variance", "sigma2_goe", "abs_error",
                          "half_sigma2_error", "log_L_over_L2", "tail_bound"),
    "trace-eval": ("L", "tau", *(f"n_osc_{c}" for c in CLASSES), "n_osc", "nbar", "statistic"),
}


class UsageError(Exception):
    def __init__(self, flag, msg):
        self.flag = flag
        super().__init__(f"{flag}: {msg}" if flag else msg)


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str = "fejer"
    beta: float = 1.0
    L: float | None = None
    tau: float = 0.0
    tau0: bool = False
    genus: int | None = None
    k_budget: int = 400
    envelope_c: float = 1.0
    taus: tuple = ()
    Ls: tuple = ()
    spectrum: str | None = None
    eigenvalues: str | None = None
    output: str | None = None
    fmt: str = "csv"
    seed: int = 42
    dim: int = 1000
    samples: int = 400
    bulk_fraction: float = 0.5
    extra: dict = field(default_factory=dict)

    def pair(self) -> TestFunctionPair:
        return TestFunctionPair(self.family, self.beta)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(None, message)


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wpstat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wpstat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--family", default="fejer", choices=FAMILIES)
        p.add_argument("--beta", type=float, default=1.0)
        p.add_argument("--output", "-o")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    def window(p, need_L=True):
        p.add_argument("--L", type=float, required=need_L)
        p.add_argument("--tau", type=float, default=0.0)

    p = sub.add_parser("goe-closed", help="closed-form GOE variance")
    common(p)

    p = sub.add_parser("goe-mc", help="Monte Carlo GOE variance")
    common(p)
    p.add_argument("--dim", type=int, default=1000)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--bulk-fraction", type=float, default=0.5)

    p = sub.add_parser("expectation", help="limit of E(N^osc), optional finite-genus band")
    common(p)
    window(p)
    p.add_argument("--genus", type=int)
    p.add_argument("--envelope-c", type=float, default=1.0)

    p = sub.add_parser("variance", help="limit second moment / variance breakdown")
    common(p)
    window(p)
    p.add_argument("--k-budget", type=int, default=400)
    p.add_argument("--tau0", action="store_true", help="use the statistic sum_j f(L r_j)")

    p = sub.add_parser("decay-study", help="I_f over tau with fitted decay slope")
    common(p)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--taus", type=_float_list, required=True)

    p = sub.add_parser("convergence-study", help="limit variance over L against the GOE value")
    common(p)
    p.add_argument("--Ls", type=_float_list, required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--k-budget", type=int, default=400)

    p = sub.add_parser("trace-eval", help="N^osc (and Nbar, statistic) for supplied surface data")
    common(p)
    p.add_argument("--L", type=float)
    p.add_argument("--Ls", type=_float_list)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--tau0", action="store_true")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--eigenvalues")
    return parser


def _validate(cfg: RunConfig) -> None:
    def need(cond, flag, msg):
        if not cond:
            raise UsageError(flag, msg)

    need(cfg.beta > 0, "--beta", "beta must be positive")
    if cfg.L is not None:
        need(cfg.L > 0 and math.isfinite(cfg.L), "--L", "L must be positive")
    need(cfg.tau >= 0 and math.isfinite(cfg.tau), "--tau", "tau must be non-negative")
    need(cfg.k_budget >= 2, "--k-budget", "k_budget must be >= 2")
    need(cfg.envelope_c >= 0, "--envelope-c", "envelope_c must be non-negative")
    if cfg.genus is not None:
        need(cfg.genus > 2, "--genus", "finite-genus band needs genus > 2")
    need(all(x > 0 for x in cfg.Ls), "--Ls", "every L must be positive")
    if cfg.command == "decay-study":
        need(len(cfg.taus) >= 1, "--taus", "at least one tau is required")
        need(all(t >= 1 for t in cfg.taus), "--taus", "every tau must be >= 1")
    if cfg.command == "trace-eval":
        need((cfg.L is None) != (not cfg.Ls), "--L", "give exactly one of --L and --Ls")
    if cfg.command == "goe-mc":
        need(cfg.dim >= 64, "--dim", "dim must be >= 64")
        need(cfg.samples >= 16, "--samples", "samples must be >= 16")
        need(0 < cfg.bulk_fraction < 1, "--bulk-fraction", "bulk_fraction must lie in (0, 1)")
        need(0 <= cfg.seed < 2**64, "--seed", "seed must be a 64-bit non-negative integer")
        need(cfg.beta <= 1, "--beta", "GOE Monte Carlo comparison requires beta <= 1")


def parse_args(argv) -> RunConfig:
    """Parse and validate; raises :class:`UsageError` on bad input."""
    ns = vars(_build_parser().parse_args(list(argv)))
    ns.pop("version", None)
    cfg = RunConfig(**{k: v for k, v in ns.items() if v is not None or k in ("L", "genus", "output")})
    _validate(cfg)
    return cfg


# ---------------------------------------------------------------------------

def _rows_goe_closed(cfg):
    return [{"family": cfg.family, "beta": cfg.beta, "sigma2_goe": sigma2_goe_closed_form(cfg.pair())}], {}


def _rows_goe_mc(cfg):
    mc = GOEMCConfig(cfg.dim, cfg.samples, cfg.seed, cfg.bulk_fraction, cfg.pair())
    res = sample_goe_variance(mc)
    return [{
        "family": cfg.family, "beta": cfg.beta, "dim": cfg.dim, "samples": cfg.samples, "seed": cfg.seed,
        "estimate": res.estimate, "std_error": res.std_error, "closed_form": res.closed_form,
        "abs_diff": abs(res.estimate - res.closed_form),
    }], {}


def _rows_expectation(cfg):
    p = KernelParams(cfg.L, cfg.tau, cfg.pair())
    t = expectation_terms(p)
    row = {"L": cfg.L, "tau": cfg.tau, "I_f": t.value, "k1_term": t.k1_term, "k2_term": t.k2_term,
           "floor": t.floor, "remainder_bound": t.remainder_bound,
           "genus": cfg.genus, "envelope_c": None, "sns_central": None, "sns_half_width": None}
    if cfg.genus is not None:
        central, half = expectation_sns_finite_g(p, cfg.genus, cfg.envelope_c)
        row.update(envelope_c=cfg.envelope_c, sns_central=central, sns_half_width=half)
    return [row], {}


def _breakdown_row(b):
    return {"L": b.L, "tau": b.tau, "normalization": b.normalization, "k_budget": b.k_budget,
            "goe_term": b.goe_term, "diag_correction": b.diag_correction, "offdiag_term": b.offdiag_term,
            "total": b.total, "variance": b.variance, "tail_bound": b.tail_bound}


def _breakdown(cfg, L, tau0):
    if tau0:
        return variance_tau0(cfg.pair(), L, cfg.k_budget)
    return limiting_variance(KernelParams(L, cfg.tau, cfg.pair()), cfg.k_budget)


def _rows_variance(cfg):
    return [_breakdown_row(_breakdown(cfg, cfg.L, cfg.tau0))], {}


def _rows_decay(cfg):
    d = decay_study_If(cfg.pair(), cfg.L, cfg.taus)
    rows = [{"tau": t, "I_f": v, "oscillating": o, "floor": fl} for t, v, o, fl in d.rows]
    return rows, {"fitted_slope": d.slope, "L": cfg.L}


def _rows_convergence(cfg):
    sigma2 = sigma2_goe_closed_form(cfg.pair())
    tau0 = cfg.tau == 0
    rows = []
    for L in cfg.Ls:
        b = _breakdown(cfg, L, tau0)
        rows.append({
            "L": L, "tau": cfg.tau, "normalization": b.normalization, "total": b.total,
            "variance": b.variance, "sigma2_goe": sigma2, "abs_error": abs(b.variance - sigma2),
            "half_sigma2_error": abs(b.variance - 0.5 * sigma2), "log_L_over_L2": math.log(L) / L**2,
            "tail_bound": b.tail_bound,
        })
    return rows, {}


def _rows_trace(cfg):
    spec = read_length_spectrum(cfg.spectrum)
    ev = read_eigenvalues(cfg.eigenvalues) if cfg.eigenvalues else None
    Ls = cfg.Ls or (cfg.L,)
    rows = []
    notes = {}
    for L in Ls:
        p = KernelParams(L, cfg.tau, cfg.pair())
        parts = n_osc_by_class(p, spec, cfg.tau0)
        row = {"L": L, "tau": cfg.tau}
        row.update({f"n_osc_{c}": parts[c] for c in CLASSES})
        row["n_osc"] = sum(parts[c] for c in CLASSES)
        try:
            row["nbar"] = weyl_main_term(p, spec.genus, tau0=cfg.tau0)
        except ValueError as exc:
            row["nbar"] = None
            notes["nbar"] = str(exc)
        row["statistic"] = statistic_from_eigenvalues(p, ev, tau0=cfg.tau0) if ev is not None else None
        rows.append(row)
    return rows, notes


_DRIVERS = {
    "goe-closed": _rows_goe_closed,
    "goe-mc": _rows_goe_mc,
    "expectation": _rows_expectation,
    "variance": _rows_variance,
    "decay-study": _rows_decay,
    "convergence-study": _rows_convergence,
    "trace-eval": _rows_trace,
}


def _metadata(cfg, extra):
    config = asdict(cfg)
    config.pop("extra")
    config.pop("output")
    config["taus"] = list(cfg.taus)
    config["Ls"] = list(cfg.Ls)
    meta = {
        "tool": "wpstat",
        "version": __version__,
        "fixtures": fixtures.as_dict(),
        "config": config,
        "timestamp": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
    }
    meta.update(extra)
    return meta


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg: RunConfig, rows, meta) -> str:
    cols = COLUMNS[cfg.command]
    if cfg.fmt == "json":
        doc = {"metadata": meta, "rows": [{c: r.get(c) for c in cols} for r in rows]}
        return json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n"
    buf = _stdio.StringIO()
    for key in sorted(meta):
        val = meta[key]
        text = json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else _cell(val)
        buf.write(f"# {key}: {text}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _destination(cfg: RunConfig):
    if cfg.output:
        return Path(cfg.output)
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir:
        return Path(outdir) / f"{cfg.command}.{cfg.fmt}"
    return None


def run(cfg: RunConfig) -> int:
    """Execute ``cfg`` and write its table; returns the exit code."""
    try:
        rows, extra = _DRIVERS[cfg.command](cfg)
    except (QuadratureError, GOEConvergenceError, FloatingPointError, ArithmeticError) as exc:
        print(f"wpstat: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"wpstat: error: {exc}", file=sys.stderr)
        return 2
    text = render(cfg, rows, _metadata(cfg, extra))
    dest = _destination(cfg)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_bytes(text.encode("ascii", errors="backslashreplace"))
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"wpstat: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return run(cfg)
