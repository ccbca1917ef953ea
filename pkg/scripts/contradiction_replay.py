"""Numerical replay of the rigidity argument for warped quasi-solitons.

If ``(f o ell)' - k ell'/ell = b`` with ``b`` constant and the auxiliary
equation ``alpha~ ell'' + f''(ell) ell'^2 = 0`` holds as well, then
``ell`` is constant.  Here both are treated as residuals of a least-squares
problem over polynomial profiles ``log ell(s)`` and ``f(ell)``: from a
non-constant start the minimizer drives ``ell'`` to zero.  This is a
demonstration, not a proof.

    python3 scripts/contradiction_replay.py [--seed N] [--k K]
"""

import argparse

import numpy as np
from scipy.optimize import least_squares

from solitonkit import jet as jm
from solitonkit.skr_ode import derivatives, warp_profile_consistency

N_ELL = 4  # coefficients of log ell, a polynomial in s
N_F = 5  # coefficients of f, a polynomial in ell


def _profiles(params):
    ce, cf = params[:N_ELL], params[N_ELL:N_ELL + N_F]

    def ell(s):
        return jm.exp(sum(c * s**i for i, c in enumerate(ce)))

    def f(l):
        return sum(c * l**i for i, c in enumerate(cf))

    return ell, f


def residuals(params, k, grid):
    ell, f = _profiles(params)
    b = params[-1]
    out = []
    for s in grid:
        l0, l1, _ = derivatives(ell, s, 2)
        _, f1 = derivatives(f, l0, 1)
        first_integral = f1 * l1 - k * l1 / l0 - b
        aux, _ = warp_profile_consistency(f, ell, k, s, tau=1.0)
        out += [first_integral, aux]
    return np.array(out)


def max_slope(params, grid):
    ell, _ = _profiles(params)
    return max(abs(derivatives(ell, s, 1)[1]) for s in grid)


def replay(seed=0, k=2, points=41):
    """Return ``(max |ell'| before, after, final residual norm)``."""
    grid = np.linspace(0.0, 1.0, points)
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-1.0, 1.0, N_ELL + N_F + 1)
    x0[1] = 1.0  # make sure the start is far from constant
    before = max_slope(x0, grid)
    sol = least_squares(residuals, x0, args=(k, grid), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    return before, max_slope(sol.x, grid), float(np.linalg.norm(sol.fun, np.inf))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()
    before, after, res = replay(args.seed, args.k, args.points)
    print(f"max |ell'| at start: {before:.3e}")
    print(f"max |ell'| at optimum: {after:.3e}")
    print(f"max residual at optimum: {res:.3e}")


if __name__ == "__main__":
    main()
