"""Deficiency-index diagnostics for vector Sturm-Liouville operators."""

import json

from . import _core
from ._core import SldlError, gallery_names, lemma2_diag, lemma2_lower_bound, lemma2_offdiag

__all__ = [
    "SldlError",
    "carleman",
    "classify_gallery",
    "equivalence_residual",
    "gallery_names",
    "lemma2_diag",
    "lemma2_lower_bound",
    "lemma2_offdiag",
    "run_cli",
    "t1_series",
    "t7",
]


def t1_series(model, intervals):
    """Interval series of the Cauchy kernel. `model` is a dict, `intervals`
    a shorthand like "unit:100" or a list of {"a", "b", "c"} dicts."""
    if not isinstance(intervals, str):
        intervals = json.dumps(intervals)
    return json.loads(_core.t1_series(json.dumps(model), intervals))


def carleman(d, N, H="zero", n=1):
    return json.loads(_core.carleman(d, H, n, N))


def t7(d, H, N, n=1):
    return json.loads(_core.t7(d, H, n, N))


def equivalence_residual(d, H, count, f, f1, n=1):
    max_abs, max_normalized, equations = _core.equivalence_residual(d, H, n, count, list(f), list(f1))
    return {"max_abs": max_abs, "max_normalized": max_normalized, "equations": equations}


def classify_gallery(key):
    return json.loads(_core.classify_gallery(key))


def run_cli(*args):
    """Runs the command-line front end in-process; returns (code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
