"""Infinite products, the discrete Hilbert transform and isolating discs.

Sequences close to ``a0 = (m^2 pi^2)_{m >= 1}`` are represented as
``a0 + perturbation`` where the perturbation is known explicitly up to an
index ``M`` and bounded by a power law ``|alpha_m| <= C m^{-p}`` beyond it.
Products over the unperturbed part use the sine product

    sin(sqrt(lam)) / sqrt(lam) = prod_{m >= 1} (m^2 pi^2 - lam) / (m^2 pi^2),

so infinite products reduce to finite ones plus a certified tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "DomainError",
    "hilbert_transform",
    "hilbert_norm_ratio",
    "hilbert_norm_check",
    "ProductValue",
    "product_eval",
    "lemma_bound",
    "lemma_bound_check",
    "IsolatingFamily",
    "PerturbedSequence",
    "ratio_product",
    "sine_product_excluding",
    "corollary24_product",
    "corollary24_residuals",
    "unit_perturbation",
]


class DomainError(ValueError):
    """Hypotheses of a product statement are violated."""


# ---------------------------------------------------------------------------
# discrete Hilbert transform


def hilbert_transform(alpha, length: int | None = None) -> np.ndarray:
    """``(H alpha)_n = sum_{m != n} alpha_m (1/(n - m) + 1/(n + m))``.

    ``alpha[0]`` holds ``alpha_1``.  Output entries are ``n = 1..length``
    (default ``len(alpha)``), evaluated by direct summation.

    Examples
    --------
    >>> hilbert_transform([1.0, 0.0, 0.0])
    array([0.        , 1.33333333, 0.75      ])
    """
    alpha = np.asarray(alpha)
    S = alpha.shape[0]
    L = S if length is None else int(length)
    n = np.arange(1, L + 1)[:, None].astype(float)
    m = np.arange(1, S + 1)[None, :].astype(float)
    with np.errstate(divide="ignore"):
        K = 1.0 / (n - m) + 1.0 / (n + m)
    K[n[:, 0][:, None] == m] = 0.0
    K = np.where(np.isfinite(K), K, 0.0)
    return K @ alpha


def hilbert_norm_ratio(alpha, length: int | None = None) -> float:
    """``||H alpha|| / ||alpha||`` with the output truncated to ``length``."""
    alpha = np.asarray(alpha)
    norm = np.linalg.norm(alpha)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(hilbert_transform(alpha, length)) / norm)


def hilbert_norm_check(trials: int = 1000, max_support: int = 256, seed: int = 0,
                       length_factor: int = 4) -> float:
    """Largest norm ratio over random complex vectors with random support."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        S = int(rng.integers(1, max_support + 1))
        alpha = rng.standard_normal(S) + 1j * rng.standard_normal(S)
        worst = max(worst, hilbert_norm_ratio(alpha, length_factor * S))
    return worst


# ---------------------------------------------------------------------------
# products with certified tails


@dataclass(frozen=True)
class ProductValue:
    """Partial product and a radius certified to contain the full product."""

    value: complex
    tail_bound: float

    def contains(self, z) -> bool:
        return abs(complex(z) - self.value) <= self.tail_bound * (1 + 1e-12) + 1e-15


def power_tail(C: float, p: float, M: int) -> float:
    """Bound on ``sum_{m > M} C m^{-p}`` (integral comparison)."""
    if p <= 1:
        raise DomainError(f"tail law m^-{p} is not summable")
    return C * M ** (1.0 - p) / (p - 1.0)


def product_eval(head, tail_l1: float | None = None, tail_law: tuple | None = None) -> ProductValue:
    """``prod_{m >= 1} (1 + a_m)`` from ``a_1..a_M`` plus a tail bound.

    Parameters
    ----------
    head : array_like
        ``a_1, ..., a_M``.
    tail_l1 : float, optional
        Bound on ``sum_{m > M} |a_m|``.
    tail_law : (C, p), optional
        ``|a_m| <= C m^{-p}`` for ``m > M``; converted to an l1 bound.

    Returns
    -------
    ProductValue
        ``|prod - value| <= |value| (exp(T) - 1)`` where ``T`` is the tail l1
        bound, since ``|prod_{m > M}(1 + a_m) - 1| <= exp(T) - 1``.
    """
    head = np.asarray(head, dtype=complex)
    M = head.shape[0]
    if tail_l1 is None and tail_law is not None:
        C, p = tail_law
        tail_l1 = power_tail(C, p, max(M, 1))
    T = 0.0 if tail_l1 is None else float(tail_l1)
    if not math.isfinite(T) or T < 0:
        raise DomainError("tail is not summable")
    value = complex(np.prod(1.0 + head)) if M else 1.0 + 0j
    return ProductValue(value, abs(value) * math.expm1(T))


def lemma_bound(a) -> float:
    """``|A| e^S + B e^{S + S^2}`` bounding ``|prod (1 + a_m) - 1|``.

    Requires ``|a_m| <= 1/2``.
    """
    a = np.asarray(a, dtype=complex)
    if a.size and np.max(np.abs(a)) > 0.5:
        raise DomainError("lemma requires |a_m| <= 1/2")
    A = abs(a.sum())
    S = float(np.abs(a).sum())
    B = float((np.abs(a) ** 2).sum())
    return A * math.exp(S) + B * math.exp(S + S * S)


def lemma_bound_check(trials: int = 1000, max_len: int = 200, seed: int = 0) -> float:
    """Largest ``|prod (1 + a_m) - 1| / lemma_bound(a)`` over random sequences.

    Entries are complex with random length, scale and sign pattern, then
    clipped to ``|a_m| <= 1/2``.  A value at most 1 means no violation.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        L = int(rng.integers(1, max_len + 1))
        decay = np.arange(1, L + 1) ** -rng.uniform(0.0, 3.0)
        a = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) * decay
        a *= 10 ** rng.uniform(-4, 0) * 0.5 / np.max(np.abs(a))
        exact = abs(complex(np.prod(1.0 + a)) - 1.0)
        bound = lemma_bound(a)
        if bound > 0:
            worst = max(worst, exact / bound)
    return worst


# ---------------------------------------------------------------------------
# isolating neighbourhoods


@dataclass(frozen=True)
class IsolatingFamily:
    """Discs ``U_n`` with ``U_n = D_r^n = {|lam - n^2 pi^2| < r pi^2}`` for ``n > n0``.

    Discs for ``n <= n0`` may be given explicitly by ``centers`` and ``radii``
    (real centres, increasing).  ``rho`` is the separation constant:
    ``|lam - mu| >= |n^2 - m^2| / rho`` for ``lam`` in ``U_n``, ``mu`` in ``U_m``.
    """

    n0: int = 0
    r: float = 0.25
    rho: float = field(default=None)  # type: ignore[assignment]
    centers: tuple = ()
    radii: tuple = ()

    def __post_init__(self):
        if not 0 < self.r < 1.5:
            raise DomainError("r must lie in (0, 3/2) for the standard discs to be disjoint")
        if len(self.centers) != self.n0 or len(self.radii) not in (0, self.n0):
            if self.centers or self.radii:
                raise DomainError("centers/radii must be given for n = 1..n0")
        if not self.centers:
            object.__setattr__(self, "centers", tuple(float(n * n * np.pi ** 2)
                                                      for n in range(1, self.n0 + 1)))
        if not self.radii:
            object.__setattr__(self, "radii", tuple(self.r * np.pi ** 2 for _ in range(self.n0)))
        if self.rho is None:
            object.__setattr__(self, "rho", 1.0 / (np.pi ** 2 * (1.0 - 2.0 * self.r / 3.0)))

    @classmethod
    def standard(cls, r: float = 0.25) -> "IsolatingFamily":
        return cls(0, r)

    def center(self, n: int) -> float:
        return self.centers[n - 1] if n <= self.n0 else float(n * n * np.pi ** 2)

    def radius(self, n: int) -> float:
        return self.radii[n - 1] if n <= self.n0 else self.r * np.pi ** 2

    def contains(self, n: int, lam) -> bool:
        return abs(complex(lam) - self.center(n)) < self.radius(n)

    def check(self, n_max: int = 64) -> list[str]:
        """Violations of the disc, ordering and separation hypotheses up to ``n_max``."""
        problems = []
        for n in range(1, n_max + 1):
            z, R = self.center(n), self.radius(n)
            if abs(z - n * n * np.pi ** 2) + R > self.r * np.pi ** 2 * (1 + 1e-12):
                problems.append(f"U_{n} not inside D_r^{n}")
            if n > 1 and not self.center(n - 1) < z:
                problems.append(f"centres not increasing at {n}")
            for m in range(1, n):
                gap = abs(z - self.center(m)) - R - self.radius(m)
                if gap <= 0:
                    problems.append(f"U_{m} and U_{n} intersect")
                elif gap < abs(n * n - m * m) / self.rho * (1 - 1e-12):
                    problems.append(f"separation fails for ({m}, {n})")
        return problems


# ---------------------------------------------------------------------------
# sequences close to a0


@dataclass(frozen=True)
class PerturbedSequence:
    """``a_m = m^2 pi^2 + alpha_m``.

    Parameters
    ----------
    perturbation : mapping or callable
        Explicit ``alpha_m``; a callable is evaluated for ``m <= cutoff``.
    cutoff : int
        Largest index with an explicit perturbation.
    tail_law : (C, p), optional
        ``|alpha_m| <= C m^{-p}`` for ``m > cutoff``; ``None`` means the
        perturbation vanishes beyond the cutoff.
    """

    perturbation: Mapping[int, complex] | Callable[[int], complex] = field(default_factory=dict)
    cutoff: int = 0
    tail_law: tuple | None = None

    def __post_init__(self):
        if not callable(self.perturbation):
            keys = list(self.perturbation)
            cut = max(keys, default=0)
            object.__setattr__(self, "cutoff", max(self.cutoff, cut))

    def alpha(self, m: int) -> complex:
        if m > self.cutoff:
            return 0j
        if callable(self.perturbation):
            return complex(self.perturbation(m))
        return complex(self.perturbation.get(m, 0))

    def __getitem__(self, m: int) -> complex:
        return m * m * np.pi ** 2 + self.alpha(m)

    def l2_norm(self) -> float:
        """Norm of the explicit part of ``a - a0``."""
        return math.sqrt(sum(abs(self.alpha(m)) ** 2 for m in range(1, self.cutoff + 1)))


def ratio_product(a: PerturbedSequence, b: PerturbedSequence, lambda_n, n: int,
                  fam: IsolatingFamily | None = None) -> ProductValue:
    """``f_n = prod_{m != n} (a_m - lam_n) / (b_m - lam_n)``.

    Factors with ``a_m = b_m`` equal one, so only the explicit supports
    contribute; power-law tails are bounded through the separation constant
    of ``fam``.
    """
    fam = fam or IsolatingFamily.standard()
    lam = complex(lambda_n)
    if not fam.contains(n, lam):
        raise DomainError(f"lambda_{n} = {lam!r} is not in U_{n}")
    M = max(a.cutoff, b.cutoff)
    value = 1.0 + 0j
    for m in range(1, M + 1):
        if m == n:
            continue
        bm = b[m]
        if not fam.contains(m, bm):
            raise DomainError(f"b_{m} = {bm!r} is not in U_{m}")
        am = a[m]
        if am != bm:
            value *= (am - lam) / (bm - lam)
    # tail: |a_m - b_m| <= sum C m^-p and |b_m - lam| >= |m^2 - n^2| / rho
    T = 0.0
    laws = [law for law in (a.tail_law, b.tail_law) if law is not None]
    for C, p in laws:
        if p <= -1:
            raise DomainError("tail law not summable")
        start = max(M, 2 * n)
        for m in range(M + 1, start + 1):
            if m != n:
                T += C * m ** (-p) * fam.rho / abs(m * m - n * n)
        # beyond 2n one has m^2 - n^2 >= 3 m^2 / 4
        T += 4 * fam.rho / 3 * C * start ** (-p - 1) / (p + 1)
    return ProductValue(value, abs(value) * math.expm1(T))


def sine_product_excluding(lam, n: int) -> complex:
    """``prod_{m != n} (m^2 pi^2 - lam) / (m^2 pi^2)`` in closed form.

    Equals ``sin(s)/s * n^2 pi^2 / (n^2 pi^2 - lam)`` with ``s = sqrt(lam)``,
    evaluated as ``(-1)^(n+1) sinc(s - n pi) n^2 pi^2 / (s (s + n pi))`` to
    avoid cancellation near ``lam = n^2 pi^2``.
    """
    s = np.sqrt(complex(lam))
    d = s - n * np.pi
    sinc = np.sinc(d / np.pi)
    return complex((-1) ** (n + 1) * sinc * (n * np.pi) ** 2 / (s * (s + n * np.pi)))


def corollary24_product(a: PerturbedSequence, lam, n: int) -> complex:
    """``prod_{m != n} (a_m - lam) / (m^2 pi^2)`` for finitely perturbed ``a``."""
    if a.tail_law is not None:
        raise DomainError("closed form needs a finitely supported perturbation")
    value = sine_product_excluding(lam, n)
    lam = complex(lam)
    for m in range(1, a.cutoff + 1):
        alpha = a.alpha(m)
        if m == n or alpha == 0:
            continue
        value *= (a[m] - lam) / (m * m * np.pi ** 2 - lam)
    return complex(value)


def unit_perturbation(cutoff: int = 64, p: float = 1.0) -> PerturbedSequence:
    """``alpha_m = c m^{-p}`` for ``m <= cutoff`` normalised to unit l2 norm."""
    weights = np.arange(1, cutoff + 1, dtype=float) ** -p
    c = 1.0 / np.linalg.norm(weights)
    return PerturbedSequence({m: c * weights[m - 1] for m in range(1, cutoff + 1)}, cutoff)


def corollary24_residuals(a: PerturbedSequence, ns) -> list[tuple[int, complex, float]]:
    """Rows ``(n, f_n, n |f_n - (-1)^(n+1)/2|)`` with ``f_n`` taken at ``lam = a_n``."""
    rows = []
    for n in ns:
        f = corollary24_product(a, a[n], n)
        rows.append((int(n), f, float(n * abs(f - (-1) ** (n + 1) / 2))))
    return rows
