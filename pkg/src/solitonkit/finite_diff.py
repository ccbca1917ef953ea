"""Central finite differences: an independent check on the jet machinery.

Nothing here touches :mod:`solitonkit.jet`; fields are called on plain
float arrays and every geometric quantity is assembled with explicit
coordinate loops.  Accuracy is O(h^2) per differentiation level.
"""

import numpy as np

DEFAULT_STEP = 1e-4


def _eval(fn, p):
    return np.asarray(fn(np.asarray(p, dtype=float)), dtype=float)


def first_partials(fn, p, h=DEFAULT_STEP):
    """``out[..., i] = d_i fn(p)`` by central differences."""
    p = np.asarray(p, dtype=float)
    cols = []
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = h
        cols.append((_eval(fn, p + e) - _eval(fn, p - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def second_partials(fn, p, h=DEFAULT_STEP):
    """``out[..., i, j] = d_i d_j fn(p)``."""
    p = np.asarray(p, dtype=float)
    n = p.size
    f0 = _eval(fn, p)
    out = np.zeros(f0.shape + (n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        out[..., i, i] = (_eval(fn, p + ei) - 2 * f0 + _eval(fn, p - ei)) / h**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            val = (
                _eval(fn, p + ei + ej) - _eval(fn, p + ei - ej)
                - _eval(fn, p - ei + ej) + _eval(fn, p - ei - ej)
            ) / (4 * h**2)
            out[..., i, j] = val
            out[..., j, i] = val
    return out


def christoffel_fd(metric, p, h=DEFAULT_STEP):
    p = np.asarray(p, dtype=float)
    n = p.size
    g = _eval(metric, p)
    ginv = np.linalg.inv(g)
    dg = first_partials(metric, p, h)  # dg[a, b, c] = d_c g_ab
    gam = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for l in range(n):
                    s += ginv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l])
                gam[k, i, j] = 0.5 * s
    return gam


def ricci_fd(metric, p, h=DEFAULT_STEP):
    """Ricci tensor from finite-difference Christoffel symbols and their partials."""
    p = np.asarray(p, dtype=float)
    n = p.size
    gam = christoffel_fd(metric, p, h)
    dgam = np.zeros((n, n, n, n))  # dgam[k, i, j, m] = d_m gamma^k_ij
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        dgam[..., m] = (christoffel_fd(metric, p + e, h) - christoffel_fd(metric, p - e, h)) / (2 * h)
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += dgam[k, i, j, k] - dgam[k, i, k, j]
                for l in range(n):
                    s += gam[k, k, l] * gam[l, i, j] - gam[k, j, l] * gam[l, i, k]
            ric[i, j] = s
    return 0.5 * (ric + ric.T)


def hessian_fd(metric, f, p, h=DEFAULT_STEP):
    p = np.asarray(p, dtype=float)
    n = p.size
    gam = christoffel_fd(metric, p, h)
    df = first_partials(f, p, h)
    ddf = second_partials(f, p, h)
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            out[a, b] = ddf[a, b] - sum(gam[c, a, b] * df[c] for c in range(n))
    return out


def laplacian_fd(metric, f, p, h=DEFAULT_STEP):
    ginv = np.linalg.inv(_eval(metric, p))
    return float(np.sum(ginv * hessian_fd(metric, f, p, h)))


def gradient_fd(metric, f, p, h=DEFAULT_STEP):
    ginv = np.linalg.inv(_eval(metric, p))
    return ginv @ first_partials(f, p, h)


def lie_derivative_fd(metric, w, p, h=DEFAULT_STEP):
    """Coordinate formula ``w^c d_c g_ab + g_cb d_a w^c + g_ac d_b w^c``."""
    p = np.asarray(p, dtype=float)
    n = p.size
    g = _eval(metric, p)
    dg = first_partials(metric, p, h)
    wv = _eval(w, p)
    dw = first_partials(w, p, h)  # dw[c, a] = d_a w^c
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            s = sum(wv[c] * dg[a, b, c] for c in range(n))
            s += sum(g[c, b] * dw[c, a] + g[a, c] * dw[c, b] for c in range(n))
            out[a, b] = s
    return out
