"""Deterministic sample points inside a coordinate box, away from excluded sets."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from . import jet as jm
from .jet import Jet

__all__ = ["DEFAULT_POINTS", "DEFAULT_MARGIN", "distance_estimate", "sample_points"]

DEFAULT_POINTS = 32
DEFAULT_MARGIN = 1e-3


def distance_estimate(h, p):
    """First-order distance ``|h| / |grad h|`` from ``p`` to the zero set of ``h``."""
    out = h(jm.variables(np.asarray(p, dtype=float), 1))
    if not isinstance(out, Jet):
        return np.inf if float(out) != 0.0 else 0.0
    val = float(out.value)
    slope = float(np.linalg.norm(out.c[1]))
    if val == 0.0:
        return 0.0
    return np.inf if slope == 0.0 else abs(val) / slope


def sample_points(box, count=DEFAULT_POINTS, seed=0, excluded=(), margin=DEFAULT_MARGIN, max_draws=None):
    """``count`` scrambled-Halton points in ``box`` at distance >= ``margin`` from each excluded set.

    ``excluded`` is an iterable of callables ``h`` whose zero sets are to be
    avoided.  Rejected points are replaced by further draws of the same
    sequence, so results depend only on ``(box, count, seed, excluded, margin)``.
    """
    if count < 1:
        raise ValueError("sample count must be at least 1")
    lo, hi = (np.asarray(b, dtype=float) for b in box)
    dim = lo.size
    engine = qmc.Halton(d=dim, scramble=True, seed=seed)
    max_draws = max_draws or 64 * count + 256
    pts = []
    drawn = 0
    while len(pts) < count:
        if drawn >= max_draws:
            raise RuntimeError(
                f"only {len(pts)} of {count} admissible points after {drawn} draws; "
                "the excluded sets cover too much of the box"
            )
        batch = lo + engine.random(count) * (hi - lo)
        drawn += count
        for p in batch:
            if all(distance_estimate(h, p) >= margin for h in excluded):
                pts.append(p)
                if len(pts) == count:
                    break
    return np.array(pts)
