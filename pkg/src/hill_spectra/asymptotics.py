"""Expansion coefficients of the eigenvalue asymptotics and theorem predictors.

With ``a_k = int_0^1 s_k`` let

    F(z) = sum_{1 <= 2l+1 <= N+2} (-1)^l a_{2l+1} z^{2l+1} / 2^{2l+1}.

The odd power series ``rho(z) = sum b_{2k+1} z^{2k+1}`` is the unique solution
near zero of ``rho(z) = F(z / (pi + z rho(z)))``.  Substituting ``z = 1/n`` into
``(n pi + rho(1/n))^2`` gives

    m_n = n^2 pi^2 + sum_{2 <= 2j <= N+1} c_{2j} / n^{2j},
    c_{2j} = 2 pi b_{2j+1} + sum_{l + l' = j - 1; l, l' >= 1} b_{2l+1} b_{2l'+1}.

Series arithmetic is written over plain Python numbers so the same code runs
on complex floats and on sympy expressions (exact path).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .diffpoly import a_k, a_k_exact
from .potential import Potential

__all__ = [
    "DomainError",
    "THEOREMS",
    "rho_series",
    "rho_coeffs",
    "mn_coeffs",
    "AsymptoticModel",
    "m_n",
    "predict",
    "exact_model_coeffs",
]

THEOREMS = ("kappa", "mu", "eta", "tau", "lambda_pair", "lambda_real", "gap", "tau_minus_mu")


class DomainError(ValueError):
    """Inputs outside the domain of a predictor."""


# ---------------------------------------------------------------------------
# truncated power series (lists of coefficients, index = power)


def _mul(a, b, order, simplify=None):
    out = [0] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if y == 0:
                continue
            out[i + j] = out[i + j] + x * y
    return [simplify(c) for c in out] if simplify else out


def _inverse(a, order, simplify=None):
    """Reciprocal of a series with nonzero constant term."""
    out = [0] * (order + 1)
    out[0] = 1 / a[0]
    for k in range(1, order + 1):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * out[k - j]
        out[k] = -acc / a[0]
        if simplify:
            out[k] = simplify(out[k])
    return out


def _compose(coeffs, u, order, simplify=None):
    """``sum_k coeffs[k] u^k`` for a series ``u`` without constant term."""
    out = [0] * (order + 1)
    for c in reversed(coeffs):
        out = _mul(out, u, order, simplify)
        out[0] = out[0] + c
    return [simplify(c) for c in out] if simplify else out


def _f_coeffs(a_odd):
    """Power coefficients of ``F`` from ``[a_1, a_3, ...]``."""
    coeffs = [0] * (2 * len(a_odd))
    for l, a in enumerate(a_odd):
        coeffs[2 * l + 1] = (-1) ** l * a / 2 ** (2 * l + 1)
    return coeffs


def rho_series(a_odd, order: int, pi=np.pi, simplify=None):
    """All power coefficients of ``rho`` through ``z^order``.

    The fixed point ``rho <- F(z / (pi + z rho))`` gains at least one correct
    order per sweep, so ``order + 1`` sweeps suffice.
    """
    F = _f_coeffs(list(a_odd))
    rho = [0] * (order + 1)
    z = [0, 1] + [0] * (order - 1)
    for _ in range(order + 1):
        denom = [pi] + [0] * order
        zr = [0] + rho[:order]  # z * rho
        denom = [d + e for d, e in zip(denom, zr)]
        u = _mul(z, _inverse(denom, order, simplify), order, simplify)
        rho = _compose(F, u, order, simplify)
    return rho


def rho_coeffs(a_odd, K: int, pi=np.pi, simplify=None) -> list:
    """``[b_1, b_3, ..., b_{2K+1}]`` from ``[a_1, a_3, ...]``.

    Examples
    --------
    >>> b = rho_coeffs([0.0, -2.0], 1)
    >>> abs(b[1] - 2 / (8 * np.pi ** 3)) < 1e-15
    True
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    series = rho_series(a_odd, 2 * K + 1, pi, simplify)
    return [series[2 * k + 1] for k in range(K + 1)]


def mn_coeffs(b_odd, N: int, pi=np.pi) -> list:
    """``[c_2, c_4, ...]`` for ``2 <= 2j <= N + 1``.

    Requires ``b_1 = 0`` (zero-mean potentials).
    """
    b = list(b_odd)
    if b and b[0] != 0:
        raise DomainError("mn_coeffs requires b_1 == 0")
    out = []
    for j in range(1, (N + 1) // 2 + 1):
        c = 2 * pi * (b[j] if j < len(b) else 0)
        for l in range(1, j):
            lp = j - 1 - l
            if lp >= 1 and l < len(b) and lp < len(b):
                c = c + b[l] * b[lp]
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# model


def _odd_indices(N: int) -> list[int]:
    return list(range(1, N + 3, 2))


@dataclass
class AsymptoticModel:
    """Coefficients ``a_{2l+1}``, ``b_{2k+1}``, ``c_{2j}`` for one potential.

    Parameters
    ----------
    q : Potential
    N : int
        Regularity index; sets the truncation ranges.
    """

    q: Potential
    N: int
    a_odd: list = field(init=False)
    b_odd: list = field(init=False)
    c_even: list = field(init=False)

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        self.a_odd = [a_k(k, self.q) for k in _odd_indices(self.N)]
        self.b_odd = rho_coeffs(self.a_odd, len(self.a_odd) - 1)
        self.b_odd[0] = 0j  # a_1 = 0 exactly
        self.c_even = mn_coeffs(self.b_odd, self.N)

    def m_n(self, n: int) -> complex:
        """``n^2 pi^2 + sum c_{2j} n^{-2j}``."""
        if n < 1:
            raise ValueError("n must be positive")
        return complex(n * n * np.pi ** 2
                       + sum(c / n ** (2 * (j + 1)) for j, c in enumerate(self.c_even)))

    def predict(self, theorem: str, n: int):
        return predict(self, theorem, n)

    def max_imag(self) -> float:
        vals = list(self.a_odd) + list(self.b_odd) + list(self.c_even)
        return max((abs(complex(v).imag) for v in vals), default=0.0)

    def to_json_dict(self) -> dict:
        def pairs(vals):
            return [[complex(v).real, complex(v).imag] for v in vals]

        return {
            "N": self.N,
            "potential_digest": self.q.digest(),
            "potential": self.q.to_json_dict(),
            "a_odd": pairs(self.a_odd),
            "b_odd": pairs(self.b_odd),
            "c_even": pairs(self.c_even),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def m_n(model: AsymptoticModel, n: int) -> complex:
    return model.m_n(n)


def predict(model: AsymptoticModel, theorem: str, n: int):
    """Deterministic right-hand side of each asymptotic statement.

    ``lambda_pair`` and ``lambda_real`` return an (unordered) pair; every
    other theorem returns a complex number.
    """
    q = model.q
    if theorem not in THEOREMS:
        raise DomainError(f"unknown theorem {theorem!r}")
    if theorem in ("lambda_real", "gap") and not q.is_real:
        raise DomainError(f"{theorem} requires a real potential")
    if n < 1:
        raise DomainError("n must be positive")
    if theorem == "kappa":
        return q.pairing("sin", n) / (2 * np.pi * n)
    if theorem == "tau_minus_mu":
        return q.pairing("cos", n)
    if theorem == "gap":
        return 2 * abs(q.pairing("exp", n))
    m = model.m_n(n)
    if theorem == "mu":
        return m - q.pairing("cos", n)
    if theorem == "eta":
        return m + q.pairing("cos", n)
    if theorem == "tau":
        return m
    if theorem == "lambda_pair":
        s = np.sqrt(complex(q.pairing("exp", n) * q.pairing("exp", -n)))
        return (m - s, m + s)
    s = abs(q.pairing("exp", n))
    return (m - s, m + s)


def exact_model_coeffs(q: Potential, N: int):
    """Exact ``(a_odd, b_odd, c_even)`` as sympy expressions in ``pi``.

    Every coefficient of ``q`` is converted to a Gaussian rational, so the
    results are exact for rational inputs.
    """
    import sympy

    def to_sym(pp):
        return sympy.expand(sum((sympy.Rational(str(c.x)) + sympy.I * sympy.Rational(str(c.y)))
                                * (2 * sympy.pi) ** d for d, c in pp.coeffs.items()))

    a_odd = [to_sym(a_k_exact(k, q)) for k in _odd_indices(N)]
    simplify = sympy.expand
    b_odd = rho_coeffs(a_odd, len(a_odd) - 1, pi=sympy.pi,
                       simplify=lambda e: sympy.simplify(e) if e != 0 else 0)
    b_odd = [sympy.simplify(b) for b in b_odd]
    c_even = [simplify(c) for c in mn_coeffs(b_odd, N, pi=sympy.pi)]
    return a_odd, b_odd, c_even
