"""Command line front end: one subcommand per checked statement.

Exit status: 0 when every asserted bound passes, 1 when one fails,
2 on invalid arguments, 3 when a size exceeds the configured capacity.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import core, crossings, distribution, evaluation, identities, reports
from .core import CapacityError
from .crossings import DomainError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

TAU_EVAL_REL = 1e-6


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    k: int = 10
    oversample: int = crossings.DEFAULT_OVERSAMPLE
    eta: str = "0"
    epsilon: str = "0.05"
    q: list = field(default_factory=lambda: [2.0, 4.0, 6.0, 8.0])
    bins: int = 64
    grid: int | None = None
    cells: int = 16
    which: str = "p"
    refine: bool = False
    out: str | None = None
    format: str = "json"
    threads: int | None = None

    @property
    def n(self) -> int:
        return 1 << self.k

    def grid_size(self, default_factor: int = 16) -> int:
        return self.grid if self.grid is not None else default_factor * self.n

    def public(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        d.pop("threads")
        return d


def _parse_q(values) -> list[float]:
    if not values:
        return [2.0, 4.0, 6.0, 8.0]
    out = []
    for v in values:
        for part in str(v).split(","):
            if part.strip():
                q = float(part)
                if not q > 0:
                    raise UsageError(f"--q must be positive, got {part}")
                out.append(q)
    return out


COMMANDS = ("build", "eval", "autocorr", "crossings", "verify-t21", "verify-t22", "lemma31",
            "antisym", "signarg", "dist1d", "dist2d", "moments", "mahler")

FORMATS = {
    "build": ("json", "csv", "text", "packed"),
    "eval": ("json", "csv", "bin"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rs-verify", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, allow_abbrev=False)
        p.add_argument("--k", type=int, default=10)
        p.add_argument("--oversample", type=int, default=crossings.DEFAULT_OVERSAMPLE)
        p.add_argument("--eta", default="0")
        p.add_argument("--epsilon", default="0.05")
        p.add_argument("--q", action="append")
        p.add_argument("--bins", type=int, default=64)
        p.add_argument("--grid", type=int)
        p.add_argument("--cells", type=int, default=16)
        p.add_argument("--which", choices=("p", "q"), default="p")
        p.add_argument("--refine", action="store_true")
        p.add_argument("--out")
        p.add_argument("--format", choices=FORMATS.get(name, ("json", "csv")), default="json")
        p.add_argument("--threads", type=int)
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=ns.command, k=ns.k, oversample=ns.oversample, eta=ns.eta, epsilon=ns.epsilon,
        q=_parse_q(ns.q), bins=ns.bins, grid=ns.grid, cells=ns.cells, which=ns.which,
        refine=ns.refine, out=ns.out, format=ns.format, threads=ns.threads,
    )
    if cfg.k < 0:
        raise UsageError("--k must be nonnegative")
    if cfg.oversample < 1 or cfg.oversample & (cfg.oversample - 1):
        raise UsageError("--oversample must be a power of two")
    if cfg.grid is not None and (cfg.grid < 1 or cfg.grid & (cfg.grid - 1)):
        raise UsageError("--grid must be a power of two")
    if cfg.threads is not None and cfg.threads < 1:
        raise UsageError("--threads must be positive")
    for name in ("eta", "epsilon"):
        try:
            float(getattr(cfg, name))
        except ValueError:
            raise UsageError(f"--{name} must be a number") from None
    return cfg


# -- subcommands: each returns (payload, passed, csv_text) -----------------------

def _seq(cfg):
    pair = core.build_rs_pair(cfg.k)
    return pair, (pair.p if cfg.which == "p" else pair.q)


def cmd_build(cfg):
    pair, seq = _seq(cfg)
    energy = core.coefficient_energy(seq)
    grs_ok = bool(np.array_equal(pair.p.coeffs, core.grs_coefficients(pair.n)))
    passed = energy == pair.n and grs_ok
    payload = reports.envelope("build", {
        "k": cfg.k, "n": pair.n, "p": pair.p.coeffs, "q": pair.q.coeffs,
        "reciprocal_sign": core.reciprocal_sign(pair), "energy": energy,
        "closed_form_match": grs_ok,
    }, passed)
    rows = ["j,p,q"] + [f"{j},{int(a)},{int(b)}" for j, (a, b) in
                        enumerate(zip(pair.p.coeffs, pair.q.coeffs))]
    extra = {
        "text": "\n".join("+1" if c > 0 else "-1" for c in seq.coeffs) + "\n",
        "packed": core.pack_signs(seq),
    }
    return payload, passed, "\n".join(rows) + "\n", extra


def cmd_eval(cfg):
    pair, seq = _seq(cfg)
    n, N = pair.n, cfg.grid_size()
    grid = evaluation.modulus_squared(evaluation.eval_unit_circle(seq, N, cfg.threads))
    tau = TAU_EVAL_REL * n
    dev11 = identities.check_eq_1_1(cfg.k, N, cfg.threads)
    dev12 = identities.check_eq_1_2(cfg.k, N, cfg.threads) if N % 2 == 0 else 0.0
    mean = float(np.mean(grid.values))
    passed = dev11 < tau and dev12 < tau and abs(mean - n) < tau
    payload = reports.envelope("eval", {
        "k": cfg.k, "n": n, "grid_size": N, "which": cfg.which,
        "mean": mean, "min": float(grid.values.min()), "max": float(grid.values.max()),
        "eq_1_1_deviation": dev11, "eq_1_2_deviation": dev12, "tolerance": tau,
    }, passed)
    buf = io.StringIO()
    buf.write("t,value\n")
    for t, v in zip(grid.angles(), grid.values):
        buf.write(f"{float(t)!r},{float(v)!r}\n")
    return payload, passed, buf.getvalue(), {"bin": np.asarray(grid.values, "<f8").tobytes()}


def cmd_autocorr(cfg):
    pair, seq = _seq(cfg)
    ac = evaluation.autocorrelation(seq)
    N = max(2 * pair.n, 2)
    direct = evaluation.modulus_squared(evaluation.eval_unit_circle(seq, N, cfg.threads)).values
    rebuilt = evaluation.grid_from_autocorrelation(ac, N).values
    deviation = float(np.max(np.abs(direct - rebuilt)))
    passed = int(ac.c[0]) == pair.n and deviation < 1e-6
    sidelobe = int(np.max(np.abs(ac.c[1:]))) if ac.n > 1 else 0
    payload = reports.envelope("autocorrelation", {
        "k": cfg.k, "n": pair.n, "c": ac.c, "max_sidelobe": sidelobe,
        "reconstruction_deviation": deviation,
    }, passed)
    rows = ["m,c_m"] + [f"{m},{int(c)}" for m, c in enumerate(ac.c)]
    return payload, passed, "\n".join(rows) + "\n", {}


def _eta(cfg):
    return crossings.as_fraction(cfg.eta)


def cmd_crossings(cfg):
    level = (1 + _eta(cfg)) * cfg.n
    a = crossings.analyze_level(cfg.k, level, cfg.oversample, which=cfg.which,
                                refine=cfg.refine, workers=cfg.threads)
    payload = reports.envelope("crossings", {
        "k": cfg.k, "n": cfg.n, "eta": _eta(cfg), "oversample": cfg.oversample,
        **reports.crossing_payload(a.report),
        "interval_hits": len(a.hit_intervals),
    }, True)
    return payload, True, reports.crossings_csv(a.report), {}


def cmd_verify_t21(cfg):
    if cfg.k < 2:
        raise UsageError("verify-t21 needs --k >= 2")
    r = crossings.verify_theorem_2_1(cfg.k, cfg.oversample, which=cfg.which,
                                     refine=cfg.refine, workers=cfg.threads)
    return reports.theorem_21_payload(r), all(r.passed), reports.crossings_csv(r.analysis.report), {}


def cmd_verify_t22(cfg):
    r = crossings.verify_theorem_2_2(cfg.k, cfg.eta, cfg.epsilon, cfg.oversample,
                                     which=cfg.which, refine=cfg.refine, workers=cfg.threads)
    return reports.theorem_22_payload(r), r.passed, reports.crossings_csv(r.analysis.report), {}


def cmd_lemma31(cfg):
    if cfg.k < 2:
        raise UsageError("lemma31 needs --k >= 2")
    res = identities.lemma_3_1_residuals(cfg.k, cfg.threads)
    tol = 1e-6 * math.sqrt(cfg.n)
    worst = float(res.max())
    payload = reports.envelope("lemma-3.1", {
        "k": cfg.k, "n": cfg.n, "max_residual": worst, "tolerance": tol,
    }, worst < tol)
    rows = ["j,residual"] + [f"{j},{float(r)!r}" for j, r in enumerate(res)]
    return payload, worst < tol, "\n".join(rows) + "\n", {}


def cmd_antisym(cfg):
    N = cfg.grid_size()
    dev = identities.check_antisymmetry(cfg.k, N, cfg.which, cfg.threads)
    tol = TAU_EVAL_REL * cfg.n
    payload = reports.envelope("antisymmetry", {
        "k": cfg.k, "n": cfg.n, "grid_size": N, "max_deviation": dev, "tolerance": tol,
    }, dev < tol)
    return payload, dev < tol, f"k,grid_size,max_deviation\n{cfg.k},{N},{dev!r}\n", {}


def cmd_signarg(cfg):
    if cfg.k < 2:
        raise UsageError("signarg needs --k >= 2")
    r = crossings.verify_sign_change_argument(cfg.k, cfg.oversample, cfg.threads)
    rows = ["j,A_j"] + [f"{j},{float(v)!r}" for j, v in enumerate(r.values)]
    return reports.sign_argument_payload(r), all(r.passed), "\n".join(rows) + "\n", {}


def cmd_dist1d(cfg):
    N = cfg.grid_size()
    h = distribution.value_distribution(cfg.k, N, cfg.bins, cfg.which, cfg.threads)
    passed = abs(h.mass.sum() - 1) < 1e-12 and abs(h.mean - 0.5) < TAU_EVAL_REL
    payload = reports.envelope("distribution-1d", {
        "k": cfg.k, "n": cfg.n, "grid_size": N, "bins": cfg.bins, "edges": h.edges,
        "mass": h.mass, "reference": h.reference, "ks_statistic": h.ks_statistic, "mean": h.mean,
    }, passed)
    return payload, passed, distribution.histogram1d_csv(h), {}


def cmd_dist2d(cfg):
    N = cfg.grid_size()
    h = distribution.planar_distribution(cfg.k, N, cfg.cells, cfg.which, cfg.threads)
    e = h.edges
    nearest = np.minimum(np.abs(e[:-1]), np.abs(e[1:]))
    nearest = np.where(e[:-1] * e[1:] < 0, 0.0, nearest)
    outside = np.add.outer(nearest ** 2, nearest ** 2) > 1
    passed = abs(h.mass.sum() - 1) < 1e-12 and not np.any(h.mass[outside] > 0)
    payload = reports.envelope("distribution-2d", {
        "k": cfg.k, "n": cfg.n, "grid_size": N, "cells": cfg.cells, "edges": e,
        "mass": h.mass, "reference": h.reference, "max_cell_error": h.max_cell_error,
    }, passed)
    return payload, passed, distribution.histogram2d_csv(h), {}


def cmd_moments(cfg):
    out, passed = [], True
    for q in cfg.q:
        r = distribution.moment(cfg.k, q, cfg.grid, cfg.which, workers=cfg.threads)
        if q == 2:
            passed &= abs(r.estimate / math.sqrt(cfg.n) - 1) < 1e-12
        passed &= r.converged
        out.append(reports.moment_payload(r))
    payload = reports.envelope("moments", {"k": cfg.k, "n": cfg.n, "moments": out}, passed)
    rows = ["q,estimate,grid_size,exact,predicted,ratio"] + [
        f"{m['q']!r},{m['estimate']!r},{m['grid_size']},{int(m['exact'])},{m['predicted']!r},"
        f"{m['ratio']!r}" for m in out]
    return payload, bool(passed), "\n".join(rows) + "\n", {}


def cmd_mahler(cfg):
    _, seq = _seq(cfg)
    r = distribution.mahler_measure(seq, cfg.grid, which=cfg.which, workers=cfg.threads)
    body = {"k": cfg.k, "n": cfg.n, **reports.mahler_payload(r),
            "ratio_to_limit": r.estimate / math.sqrt(2 * cfg.n / math.e)}
    passed = r.estimate < math.sqrt(cfg.n) or cfg.k == 0
    if cfg.k <= 8:
        roots = distribution.mahler_via_roots(seq)
        body["roots_estimate"] = roots
        body["relative_difference"] = abs(r.estimate / roots - 1)
        passed &= body["relative_difference"] < 1e-6
    payload = reports.envelope("mahler", body, passed)
    return payload, bool(passed), f"k,estimate,grid_size\n{cfg.k},{r.estimate!r},{r.grid_size}\n", {}


HANDLERS = {
    "build": cmd_build, "eval": cmd_eval, "autocorr": cmd_autocorr, "crossings": cmd_crossings,
    "verify-t21": cmd_verify_t21, "verify-t22": cmd_verify_t22, "lemma31": cmd_lemma31,
    "antisym": cmd_antisym, "signarg": cmd_signarg, "dist1d": cmd_dist1d, "dist2d": cmd_dist2d,
    "moments": cmd_moments, "mahler": cmd_mahler,
}


def run(cfg: RunConfig):
    """Execute one configured subcommand; returns ``(payload, passed, rendered)``."""
    payload, passed, csv_text, extra = HANDLERS[cfg.command](cfg)
    payload["config"] = reports._clean(cfg.public())
    if cfg.format == "json":
        rendered = reports.dumps(payload)
    elif cfg.format == "csv":
        rendered = f"# schema={reports.SCHEMA} kind={payload['kind']}\n" + csv_text
    else:
        rendered = extra[cfg.format]
    return payload, passed, rendered


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        _, passed, rendered = run(cfg)
    except (UsageError, DomainError) as exc:
        print(f"rs-verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, MemoryError) as exc:
        print(f"rs-verify: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"rs-verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        if isinstance(rendered, bytes):
            Path(cfg.out).write_bytes(rendered)
        else:
            Path(cfg.out).write_text(rendered)
    elif isinstance(rendered, bytes):
        sys.stdout.buffer.write(rendered)
    else:
        sys.stdout.write(rendered)
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
