"""Versioned JSON payloads and CSV exports for every report type."""

from __future__ import annotations

import csv
import datetime
import io
import json
import math
from fractions import Fraction

import numpy as np

SCHEMA = "rudin-shapiro-report/1"
VOLATILE_FIELDS = ("generated_at",)


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def envelope(kind: str, body: dict, passed: bool | None = None) -> dict:
    payload = {"schema": SCHEMA, "kind": kind}
    if passed is not None:
        payload["passed"] = bool(passed)
    payload.update(body)
    payload["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return _clean(payload)


def stable(payload: dict) -> dict:
    """Payload without fields that legitimately differ between identical runs."""
    return {k: v for k, v in payload.items() if k not in VOLATILE_FIELDS}


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def crossing_payload(report, include_angles: bool = True) -> dict:
    body = {
        "level": report.level,
        "certified_count": report.certified_count,
        "ambiguous_cells": report.ambiguous_cells,
        "grid_size": report.grid_size,
        "refined": report.refined,
        "exact_zeros": int(np.count_nonzero(report.exact)),
    }
    if include_angles:
        body["angles"] = report.angles
    return body


def theorem_21_payload(r, include_angles: bool = True) -> dict:
    return envelope("theorem-2.1", {
        "k": r.k,
        "n": r.n,
        "level": r.n,
        "oversample": r.analysis.oversample,
        "zero_count": r.zero_count,
        "bound_zeros": r.bound_zeros,
        "interval_hits": r.interval_hits,
        "bound_intervals": r.bound_intervals,
        "pass": list(r.passed),
        "crossings": crossing_payload(r.analysis.report, include_angles),
    }, all(r.passed))


def theorem_22_payload(r, include_angles: bool = True) -> dict:
    return envelope("theorem-2.2", {
        "k": r.k,
        "n": 1 << r.k,
        "eta": r.eta,
        "epsilon": r.epsilon,
        "level": r.analysis.level,
        "oversample": r.oversample,
        "zero_count": r.zero_count,
        "bound": r.bound,
        "pass": r.passed,
        "crossings": crossing_payload(r.analysis.report, include_angles),
    }, r.passed)


def sign_argument_payload(r) -> dict:
    return envelope("sign-change-argument", {
        "k": r.k,
        "n": r.n,
        "values": r.values,
        "sign_changes": r.sign_changes,
        "bound_sign_changes": r.bound_sign_changes,
        "qualifying_pairs": r.qualifying_pairs,
        "bound_qualifying": r.bound_qualifying,
        "uncovered_intervals": r.uncovered,
        "pass": list(r.passed),
    }, all(r.passed))


def moment_payload(r) -> dict:
    return {
        "q": r.q,
        "estimate": r.estimate,
        "grid_size": r.grid_size,
        "exact": r.exact,
        "converged": r.converged,
        "predicted": r.predicted,
        "ratio": r.ratio,
    }


def mahler_payload(r) -> dict:
    return {
        "estimate": r.estimate,
        "grid_size": r.grid_size,
        "clip": r.clip,
        "grid_sensitivity": r.grid_sensitivity,
        "clip_sensitivity": r.clip_sensitivity,
        "flagged": r.flagged,
        "deflated_roots": [complex(z) for z in r.deflated_roots],
    }


def crossings_csv(report) -> str:
    """``index,cell,angle,residual,exact`` per certified crossing."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "cell", "angle", "residual", "exact"])
    for i, (cell, angle, res, ex) in enumerate(zip(report.cells, report.angles,
                                                   report.residuals, report.exact)):
        w.writerow([i, int(cell), repr(float(angle)), "" if np.isnan(res) else repr(float(res)),
                    int(ex)])
    return buf.getvalue()
