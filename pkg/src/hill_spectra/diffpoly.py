"""Exact differential polynomials in a potential q.

A monomial ``c * prod_i d^{k_i} q`` is stored as a sorted tuple of derivative
orders with a rational coefficient.  The densities ``s_k`` of the WKB phase
are generated by

    s_1 = q,   s_2 = -q',   s_{k+1} = -s_k' - sum_{j=1}^{k-1} s_{k-j} s_j,

and ``a_k = int_0^1 s_k(x) dx``.  Grading ``q`` with weight 1 and ``d/dx``
with weight 1/2 makes every ``s_k`` homogeneous of weight ``(k + 1) / 2``.
"""
from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from sympy.polys.domains import QQ_I

from .potential import FourierSeries, Potential

__all__ = [
    "DiffMonomial",
    "DiffPolynomial",
    "DepthLimitError",
    "PiPolynomial",
    "MAX_DEPTH",
    "sk",
    "isobaric_degree",
    "leading_split",
    "eval_density",
    "a_k",
    "a_k_exact",
]

MAX_DEPTH = 12

INHOMOGENEOUS = "inhomogeneous"


class DepthLimitError(ValueError):
    """Requested ``s_k`` beyond the configured symbolic depth."""


@dataclass(frozen=True)
class DiffMonomial:
    coeff: Fraction
    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(sorted(self.orders)))
        if self.coeff == 0:
            raise ValueError("monomial coefficient must be nonzero")

    @property
    def degree(self) -> Fraction:
        return len(self.orders) + Fraction(sum(self.orders), 2)

    @property
    def max_order(self) -> int:
        return max(self.orders)


class DiffPolynomial:
    """Sum of :class:`DiffMonomial` with merged, canonically ordered terms."""

    def __init__(self, terms: dict[tuple[int, ...], Fraction] | None = None):
        merged: dict[tuple[int, ...], Fraction] = {}
        for orders, c in (terms or {}).items():
            key = tuple(sorted(orders))
            merged[key] = merged.get(key, Fraction(0)) + Fraction(c)
        self._terms = {k: v for k, v in sorted(merged.items(), key=_term_key) if v != 0}

    @classmethod
    def q(cls) -> "DiffPolynomial":
        return cls({(0,): Fraction(1)})

    @classmethod
    def from_monomials(cls, monomials: Iterable[DiffMonomial]) -> "DiffPolynomial":
        terms: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for m in monomials:
            terms[m.orders] += m.coeff
        return cls(terms)

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    @property
    def monomials(self) -> list[DiffMonomial]:
        return [DiffMonomial(c, o) for o, c in self._terms.items()]

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        return isinstance(other, DiffPolynomial) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        out = dict(self._terms)
        for o, c in other._terms.items():
            out[o] = out.get(o, Fraction(0)) + c
        return DiffPolynomial(out)

    def __neg__(self) -> "DiffPolynomial":
        return DiffPolynomial({o: -c for o, c in self._terms.items()})

    def __sub__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        return self + (-other)

    def __mul__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        out: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for o1, c1 in self._terms.items():
            for o2, c2 in other._terms.items():
                out[tuple(sorted(o1 + o2))] += c1 * c2
        return DiffPolynomial(out)

    def diff(self) -> "DiffPolynomial":
        """Total x-derivative (Leibniz rule over the factors)."""
        out: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
        for orders, c in self._terms.items():
            for i in range(len(orders)):
                bumped = orders[:i] + (orders[i] + 1,) + orders[i + 1:]
                out[tuple(sorted(bumped))] += c
        return DiffPolynomial(out)

    def __repr__(self):
        return f"DiffPolynomial({format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


def _term_key(item):
    orders, _ = item
    # highest derivative first, then fewer factors
    return (-max(orders), len(orders), tuple(-k for k in reversed(orders)))


def _factor_text(k: int) -> str:
    return "q" + "'" * k if k <= 3 else f"q^({k})"


def _monomial_text(orders: tuple[int, ...]) -> str:
    counts: dict[int, int] = defaultdict(int)
    for k in orders:
        counts[k] += 1
    parts = []
    for k in sorted(counts):
        f = _factor_text(k)
        parts.append(f if counts[k] == 1 else f"{f}^{counts[k]}")
    return "*".join(parts)


def format_polynomial(p: DiffPolynomial) -> str:
    """Canonical text such as ``q'' - q^2``."""
    if not p:
        return "0"
    out = []
    for i, (orders, c) in enumerate(p.terms.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = _monomial_text(orders)
        text = body if mag == 1 else f"{mag}*{body}"
        if i == 0:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


# ---------------------------------------------------------------------------
# the s_k recursion

_cache: dict[int, DiffPolynomial] = {}
_cache_lock = threading.Lock()


def sk(k: int, max_depth: int | None = None) -> DiffPolynomial:
    """Symbolic ``s_k`` (memoised, thread safe)."""
    limit = MAX_DEPTH if max_depth is None else max_depth
    if k < 1:
        raise ValueError("s_k is defined for k >= 1")
    if k > limit:
        raise DepthLimitError(f"s_{k} exceeds the symbolic depth limit {limit}")
    with _cache_lock:
        if k in _cache:
            return _cache[k]
        for j in range(1, k + 1):
            if j in _cache:
                continue
            if j == 1:
                _cache[1] = DiffPolynomial.q()
            elif j == 2:
                _cache[2] = -_cache[1].diff()
            else:
                m = j - 1
                acc = -_cache[m].diff()
                for i in range(1, m):
                    acc = acc - _cache[m - i] * _cache[i]
                _cache[j] = acc
        return _cache[k]


def isobaric_degree(p: DiffPolynomial):
    """Common weight of all monomials, or ``"inhomogeneous"``."""
    if not p:
        raise ValueError("degree of the zero polynomial is undefined")
    degrees = {m.degree for m in p.monomials}
    if len(degrees) != 1:
        return INHOMOGENEOUS
    return degrees.pop()


def leading_split(k: int) -> tuple[DiffMonomial, DiffPolynomial]:
    """Split ``s_k = (-1)^(k-1) d^(k-1) q + rest``.

    Raises ``ValueError`` if the structure does not hold: every monomial of
    ``rest`` must have at least two factors and derivative orders ``<= k - 3``.
    """
    if k < 2:
        raise ValueError("leading_split needs k >= 2")
    p = sk(k)
    lead_orders = (k - 1,)
    coeff = p.terms.get(lead_orders)
    expected = Fraction((-1) ** (k - 1))
    if coeff != expected:
        raise ValueError(f"s_{k}: leading coefficient {coeff} != {expected}")
    rest = {o: c for o, c in p.terms.items() if o != lead_orders}
    for orders in rest:
        if len(orders) < 2 or max(orders) > k - 3:
            raise ValueError(f"s_{k}: unexpected monomial {_monomial_text(orders)}")
    return DiffMonomial(coeff, lead_orders), DiffPolynomial(rest)


# ---------------------------------------------------------------------------
# evaluation on a potential

def eval_density(p: DiffPolynomial, q: Potential) -> FourierSeries:
    """Fourier series of ``p`` evaluated at ``q`` (mean coefficient included)."""
    derivs: dict[int, np.ndarray] = {}
    M = q.bandwidth
    base = q.coefficient_array()
    freqs = np.arange(-M, M + 1)

    def factor(k: int) -> np.ndarray:
        if k not in derivs:
            derivs[k] = (2j * np.pi * freqs) ** k * base
        return derivs[k]

    if not p:
        return FourierSeries(np.zeros(1, dtype=complex), 0)
    width = max(len(o) for o in p.terms) * M
    total = np.zeros(2 * width + 1, dtype=complex)
    for orders, c in p.terms.items():
        acc = factor(orders[0])
        for k in orders[1:]:
            acc = np.convolve(acc, factor(k))
        bw = len(orders) * M
        total[width - bw: width + bw + 1] += float(c) * acc
    return FourierSeries(total, width)


def a_k(k: int, q: Potential) -> complex:
    """``int_0^1 s_k(x) dx`` in floating point."""
    if q.is_zero:
        return 0j
    return eval_density(sk(k), q).mean


class PiPolynomial:
    """Exact value ``sum_D c_D (2 pi)^D`` with Gaussian-rational ``c_D``.

    Since pi is transcendental the value vanishes iff every ``c_D`` does.
    """

    def __init__(self, coeffs: dict[int, object]):
        self.coeffs = {d: c for d, c in sorted(coeffs.items()) if c != QQ_I.zero}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __complex__(self):
        return complex(sum(complex(float(c.x), float(c.y)) * (2 * np.pi) ** d
                           for d, c in self.coeffs.items()))

    def __eq__(self, other):
        if isinstance(other, PiPolynomial):
            return self.coeffs == other.coeffs
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __neg__(self):
        return PiPolynomial({d: -c for d, c in self.coeffs.items()})

    def __repr__(self):
        body = " + ".join(f"({c})*(2pi)^{d}" for d, c in self.coeffs.items())
        return f"PiPolynomial({body or '0'})"


def _exact(value):
    if hasattr(value, "x") and hasattr(value, "y"):
        return QQ_I(value.x, value.y)
    if isinstance(value, (int, Fraction)):
        return QQ_I.convert(Fraction(value))
    z = complex(value)
    # floats are dyadic rationals, so this conversion is lossless
    return QQ_I(Fraction(z.real), Fraction(z.imag))


def a_k_exact(k: int, q: Potential) -> PiPolynomial:
    """``a_k`` in exact arithmetic, graded by the power of ``2 pi``.

    A monomial with total derivative order ``D`` contributes
    ``(2 pi)^D i^D sum prod n_j^{k_j} q_hat[n_j]`` over frequency tuples
    summing to zero.
    """
    coeffs = {n: _exact(c) for n, c in q.coeffs.items()}
    out: dict[int, object] = defaultdict(lambda: QQ_I.zero)
    for orders, c in sk(k).terms.items():
        series = {0: QQ_I.one}
        for kk in orders:
            nxt: dict[int, object] = defaultdict(lambda: QQ_I.zero)
            for m1, v1 in series.items():
                for n, cn in coeffs.items():
                    nxt[m1 + n] += v1 * cn * QQ_I.convert(n ** kk)
            series = {m: v for m, v in nxt.items() if v != QQ_I.zero}
        D = sum(orders)
        i_pow = [QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1)][D % 4]
        out[D] += series.get(0, QQ_I.zero) * i_pow * QQ_I.convert(c)
    return PiPolynomial(dict(out))
