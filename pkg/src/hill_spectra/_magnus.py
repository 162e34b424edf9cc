"""Sixth-order Magnus propagator for ``Y' = [[0, 1], [q - lam, 0]] Y``.

2x2 matrices are carried as 4-tuples of arrays ``(a, b, c, d)`` for
``[[a, b], [c, d]]`` so that every operation is vectorised over
(steps, lambdas).  Step propagators are combined by pairwise tree reduction,
which keeps rounding growth logarithmic in the number of steps.
"""
from __future__ import annotations

import numpy as np

_NODES = 0.5 + np.array([-np.sqrt(15.0) / 10.0, 0.0, np.sqrt(15.0) / 10.0])


def mul(X, Y):
    a, b, c, d = X
    e, f, g, h = Y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def add(X, Y):
    return tuple(x + y for x, y in zip(X, Y))


def scale(s, X):
    return tuple(s * x for x in X)


def comm(X, Y):
    P, Q = mul(X, Y), mul(Y, X)
    return tuple(p - r for p, r in zip(P, Q))


_S_SERIES = [1.0 / np.prod(np.arange(1, 2 * k + 2, dtype=float)) for k in range(9)]


def _horner(coeffs, z):
    out = np.full_like(z, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        out = out * z + c
    return out


def _cs(z):
    """``cosh(sqrt z)``, ``sinh(sqrt z)/sqrt z`` and the derivative of the latter."""
    small = np.abs(z) < 0.1
    C = np.empty_like(z)
    S = np.empty_like(z)
    dS = np.empty_like(z)
    zs = z[small]
    C_series = [1.0 / np.prod(np.arange(1, 2 * k + 1, dtype=float)) for k in range(9)]
    dS_series = [(k + 1) * _S_SERIES[k + 1] for k in range(8)]
    C[small] = _horner(C_series, zs)
    S[small] = _horner(_S_SERIES, zs)
    dS[small] = _horner(dS_series, zs)
    zl = z[~small]
    if np.iscomplexobj(z):
        r = np.sqrt(zl)
        C[~small] = np.cosh(r)
        S[~small] = np.sinh(r) / r
    else:
        neg = zl < 0
        r = np.sqrt(np.abs(zl))
        C[~small] = np.where(neg, np.cos(r), np.cosh(r))
        S[~small] = np.where(neg, np.sin(r), np.sinh(r)) / r
    dS[~small] = (C[~small] - S[~small]) / (2 * zl)
    return C, S, dS


def step_propagators(qvals, lams, h, derivative=False):
    """Magnus-6 propagators for every step and every ``lam``.

    Parameters
    ----------
    qvals : array (m, 3)
        Potential at the three Gauss nodes of each step.
    lams : array (K,)
    h : float
        Step size.

    Returns
    -------
    Phi, dPhi
        4-tuples of arrays of shape (m, K); ``dPhi`` is ``d Phi / d lam`` or
        ``None``.
    """
    q1, q2, q3 = (qvals[:, i][:, None] for i in range(3))
    lam = lams[None, :]
    zero = np.zeros(np.broadcast_shapes(q2.shape, lam.shape),
                    dtype=np.result_type(qvals, lams))
    one = zero + 1.0
    beta2 = np.sqrt(15.0) * h / 3.0 * (q3 - q1) + zero
    beta3 = 10.0 * h / 3.0 * (q3 - 2.0 * q2 + q1) + zero
    a1 = (zero, h * one, h * (q2 - lam), zero)
    a2 = (zero, zero, beta2, zero)
    a3 = (zero, zero, beta3, zero)
    C1 = comm(a1, a2)
    C2 = scale(-1.0 / 60.0, comm(a1, add(scale(2.0, a3), C1)))
    X = add(add(scale(-20.0, a1), scale(-1.0, a3)), C1)
    Y = add(a2, C2)
    W = add(add(a1, scale(1.0 / 12.0, a3)), scale(1.0 / 240.0, comm(X, Y)))
    w11 = 0.5 * (W[0] - W[3])
    z = w11 * w11 + W[1] * W[2]
    C, S, dS = _cs(z)
    Phi = (C + S * w11, S * W[1], S * W[2], C - S * w11)
    if not derivative:
        return Phi, None
    E = (zero, zero, one, zero)
    da1 = scale(-h, E)
    dC2 = scale(-1.0 / 60.0, comm(da1, add(scale(2.0, a3), C1)))
    dX = scale(-20.0, da1)
    dW = add(da1, scale(1.0 / 240.0, add(comm(dX, Y), comm(X, dC2))))
    dw11 = 0.5 * (dW[0] - dW[3])
    dz = 2.0 * w11 * dw11 + dW[1] * W[2] + W[1] * dW[2]
    dC = 0.5 * S * dz
    dSz = dS * dz
    dPhi = (dC + dSz * w11 + S * dw11, dSz * W[1] + S * dW[1],
            dSz * W[2] + S * dW[2], dC - dSz * w11 - S * dw11)
    return Phi, dPhi


def tree_product(Phi, dPhi=None):
    """Ordered product ``Phi[m-1] ... Phi[0]`` (and its lam-derivative)."""
    P = list(Phi)
    D = list(dPhi) if dPhi is not None else None
    while P[0].shape[0] > 1:
        m = P[0].shape[0]
        half = m // 2
        lo = tuple(x[0:2 * half:2] for x in P)
        hi = tuple(x[1:2 * half:2] for x in P)
        newP = mul(hi, lo)
        if D is not None:
            dlo = tuple(x[0:2 * half:2] for x in D)
            dhi = tuple(x[1:2 * half:2] for x in D)
            newD = add(mul(dhi, lo), mul(hi, dlo))
        if m % 2:
            newP = tuple(np.concatenate([n, x[-1:]]) for n, x in zip(newP, P))
            if D is not None:
                newD = tuple(np.concatenate([n, x[-1:]]) for n, x in zip(newD, D))
        P = list(newP)
        if D is not None:
            D = list(newD)
    M = tuple(x[0] for x in P)
    return M, (tuple(x[0] for x in D) if D is not None else None)


def cumulative_product(Phi):
    """Running products at every grid point ``x_j = j h`` (j = 0..m)."""
    m = Phi[0].shape[0]
    shape = (m + 1,) + Phi[0].shape[1:]
    out = [np.empty(shape, dtype=Phi[0].dtype) for _ in range(4)]
    cur = (np.ones(shape[1:], dtype=Phi[0].dtype), np.zeros(shape[1:], dtype=Phi[0].dtype),
           np.zeros(shape[1:], dtype=Phi[0].dtype), np.ones(shape[1:], dtype=Phi[0].dtype))
    for k in range(4):
        out[k][0] = cur[k]
    for j in range(m):
        cur = mul(tuple(x[j] for x in Phi), cur)
        for k in range(4):
            out[k][j + 1] = cur[k]
    return tuple(out)


def node_values(q, m):
    """Potential at the Gauss nodes of ``m`` uniform steps on [0, 1]."""
    h = 1.0 / m
    x = (np.arange(m)[:, None] + _NODES[None, :]) * h
    vals = q.evaluate(x.ravel()).reshape(m, 3)
    if q.is_real:
        vals = vals.real.copy()
    return vals
