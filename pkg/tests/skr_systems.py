"""Coefficient systems built around a known solution, shared by the SKR tests."""

import numpy as np

from solitonkit import jet as jm
from solitonkit import skr_ode as S


def constructed_system(phi, A, B, C, p, interval):
    """A consistent pair built around a known solution ``phi``."""

    def D(s):
        f0 = phi(s)
        return A(s) * _d(phi, s, 2) + B(s) * _d(phi, s, 1) + C(s) * f0

    def q(s):
        return _d(phi, s, 1) + p(s) * phi(s)

    return S.CoeffSystem(A, B, C, D, p, q, interval=interval)


def _d(fn, s, k):
    """k-th derivative of ``fn``; on a jet argument the result is again a jet."""
    if isinstance(s, jm.Jet):
        x = s
        # Taylor-expand fn^(k) around the base point using a longer jet
        inner = fn(jm.variables(np.array([float(x.value)]), k + x.order)[0])
        coeffs = [inner.c[k + j].reshape(-1)[0] for j in range(x.order + 1)]
        t = x - float(x.value)
        out = coeffs[0] + 0 * t
        fact = 1.0
        for j in range(1, x.order + 1):
            fact *= j
            out = out + coeffs[j] / fact * t**j
        return out
    return S.derivatives(fn, s, k)[k]


SYSTEMS = [
    (lambda s: jm.exp(s / 3) + s * s, lambda s: 1 + s * s, lambda s: s, lambda s: -2 + 0 * s, lambda s: jm.sin(s) + 2),
    (lambda s: 1 / (1 + s), lambda s: s + 0.5, lambda s: 1 + 0 * s, lambda s: s * s, lambda s: jm.cos(s)),
    (lambda s: jm.sin(s) + 2, lambda s: 2 + 0 * s, lambda s: -s, lambda s: 1 + 0 * s, lambda s: s),
]
