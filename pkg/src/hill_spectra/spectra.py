"""Dirichlet, Neumann, periodic and antiperiodic spectra of Hill's operator.

Eigenvalues are roots of entries of the monodromy matrix at ``x = 1``:

* Dirichlet ``mu_n``: zeros of ``y2(1, lam)``;
* Neumann ``eta_n``: zeros of ``y1'(1, lam)``;
* periodic / antiperiodic ``lam_k``: zeros of ``Delta(lam)^2 - 4``.

Each is found by batched Newton iteration over all indices at once, started
from Fourier-Galerkin eigenvalues for low indices and from the leading
asymptotics for high ones.  The periodic pair around ``n^2 pi^2`` is found
from the identity ``Delta^2 - 4 = (y1 - y2')^2 + 4 y1' y2`` (the Wronskian is
one): linearising ``y1 - y2'``, ``y1'`` and ``y2`` gives a local quadratic
model whose two roots stay well conditioned even when the gap closes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .diffpoly import a_k
from .odecore import DEFAULT_TOL, monodromy
from .potential import Potential

__all__ = [
    "SpectralError",
    "SolverError",
    "MultiplicityError",
    "BranchError",
    "ConsistencyError",
    "LabelingError",
    "galerkin_oracle",
    "lexicographic_sort",
    "dirichlet_eigs",
    "neumann_eigs",
    "periodic_eigs",
    "PeriodicSpectrum",
    "floquet_exponents",
    "FloquetResult",
    "SpectralTable",
    "build_table",
    "DISC_RADIUS",
]

DISC_RADIUS = 0.25  # isolating disc radius in units of pi^2
NEAR_DEGENERATE = 1e-7
MAX_ITER = 60


class SpectralError(RuntimeError):
    """Base class for eigenvalue computation failures."""


class SolverError(SpectralError):
    pass


class MultiplicityError(SpectralError):
    pass


class BranchError(SpectralError):
    pass


class ConsistencyError(SpectralError):
    pass


class LabelingError(SpectralError):
    pass


def lexicographic_sort(values) -> np.ndarray:
    """Sort by real part, ties broken by imaginary part."""
    values = np.asarray(values)
    if not np.iscomplexobj(values):
        return np.sort(values)
    order = np.lexsort((values.imag, values.real))
    return values[order]


# ---------------------------------------------------------------------------
# Galerkin oracle


def _cos_moment(q: Potential, p: int) -> complex:
    """``int_0^1 cos(p pi x) q(x) dx`` in closed form."""

    def J(k):
        if k == 0:
            return 1.0
        if k % 2 == 0:
            return 0.0
        return 2j / (np.pi * k)

    total = 0j
    for m, c in q.coeffs.items():
        total += complex(c) * 0.5 * (J(p + 2 * m) + J(-p + 2 * m))
    return total


def galerkin_oracle(q: Potential, boundary: str, modes: int) -> np.ndarray:
    """Eigenvalues of the truncated operator in a boundary-adapted basis.

    Parameters
    ----------
    boundary : {"dirichlet", "neumann", "periodic", "antiperiodic"}
        Basis ``sqrt2 sin(k pi x)``, ``{1, sqrt2 cos(k pi x)}``,
        ``exp(2 pi i k x)`` or ``exp(i pi (2k+1) x)``.
    modes : int
        Number of basis functions.

    Returns
    -------
    ndarray
        Ascending (real ``q``) or lexicographically sorted eigenvalues.
    """
    if modes < 1:
        raise ValueError("modes must be positive")
    if boundary == "dirichlet":
        k = np.arange(1, modes + 1)
        I = {p: _cos_moment(q, p) for p in range(0, 2 * modes + 2)}
        H = np.diag((k * np.pi) ** 2).astype(complex)
        for a in range(modes):
            for b in range(modes):
                H[a, b] += I[abs(a - b)] - I[a + b + 2]
    elif boundary == "neumann":
        k = np.arange(0, modes)
        I = {p: _cos_moment(q, p) for p in range(0, 2 * modes + 2)}
        H = np.diag((k * np.pi) ** 2).astype(complex)
        for a in range(modes):
            for b in range(modes):
                if a == 0 and b == 0:
                    H[a, b] += I[0]
                elif a == 0 or b == 0:
                    H[a, b] += math.sqrt(2) * I[max(a, b)]
                else:
                    H[a, b] += I[abs(a - b)] + I[a + b]
    elif boundary in ("periodic", "antiperiodic"):
        half = modes // 2
        if boundary == "periodic":
            k = np.arange(-half, half + 1)
            diag = (2 * np.pi * k) ** 2
        else:
            k = np.arange(-half, half)
            diag = ((2 * k + 1) * np.pi) ** 2
        H = np.diag(diag).astype(complex)
        for n, c in q.coeffs.items():
            H += complex(c) * np.eye(len(k), k=-n)
    else:
        raise ValueError(f"unknown boundary {boundary!r}")
    if q.is_real:
        if boundary in ("dirichlet", "neumann"):
            H = H.real
        return np.sort(scipy.linalg.eigvalsh(H))
    return lexicographic_sort(scipy.linalg.eigvals(H))


def _oracle_modes(count: int) -> int:
    return max(64, 2 * count + 32)


# ---------------------------------------------------------------------------
# Newton machinery


def _first_asymptotic_index(q: Potential, r: float = DISC_RADIUS) -> int:
    """Smallest index from which leading asymptotics are trusted as guesses."""
    B = q.l1_coefficient_norm()
    return max(4, math.ceil(2 * B / (r * np.pi ** 2)) + 1)


def _c2(q: Potential) -> complex:
    return -a_k(3, q) / (4 * np.pi ** 2) if not q.is_zero else 0.0


def _dtype(q):
    return float if q.is_real else complex


def _newton(q: Potential, guesses, entry: int, tol: float, label: str):
    """Batched Newton iteration on one monodromy entry.

    ``entry`` indexes ``(y1, y2, y1', y2')``.
    """
    lam = np.asarray(guesses, dtype=_dtype(q)).copy()
    itol = max(tol, 1e-14)
    _, _, _, steps = monodromy(q, lam, itol)
    active = np.ones(lam.shape, dtype=bool)
    last = np.full(lam.shape, np.inf)
    deriv = np.zeros(lam.shape, dtype=lam.dtype)
    for _ in range(MAX_ITER):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        M, dM, _, _ = monodromy(q, lam[idx], itol, derivative=True, steps=steps)
        f, df = M[entry], dM[entry]
        deriv[idx] = df
        step = f / df
        lam[idx] = lam[idx] - step
        last[idx] = np.abs(step)
        done = np.abs(step) <= tol * np.maximum(1.0, np.abs(lam[idx]))
        active[idx[done]] = False
    stuck = active & (last > 1e3 * tol * np.maximum(1.0, np.abs(lam)))
    if np.any(stuck):
        k = int(np.nonzero(stuck)[0][0])
        raise SolverError(f"{label}: Newton failed for index {k} near {lam[k]!r}")
    # final derivative at the converged roots for the simplicity certificate
    M, dM, _, _ = monodromy(q, lam, itol, derivative=True)
    small = np.abs(dM[entry]) * np.maximum(1.0, np.abs(lam)) <= 1e-8
    if np.any(small):
        k = int(np.nonzero(small)[0][0])
        raise MultiplicityError(f"{label}: root {lam[k]!r} is not simple")
    return lam, M


def _check_roots(lam, ns, guesses, label, n_first_asym, oracle=None):
    """Roots must stay in their isolating discs or agree with the oracle."""
    for i, n in enumerate(ns):
        if n >= n_first_asym:
            radius = DISC_RADIUS * np.pi ** 2 * max(1, n)
            if abs(lam[i] - guesses[i]) > radius:
                raise SolverError(f"{label}: root {n} left its isolating disc "
                                  f"({lam[i]!r} vs guess {guesses[i]!r})")
        elif oracle is not None:
            ref = oracle[i]
            if abs(lam[i] - ref) > 1e-6 * max(1.0, abs(ref)):
                raise SolverError(f"{label}: root {n} = {lam[i]!r} disagrees with "
                                  f"Galerkin value {ref!r}")
    if lam.size > 1 and np.isrealobj(lam) and np.any(np.diff(lam) <= 0):
        raise SolverError(f"{label}: roots are not strictly increasing")


def _validate(n_max, tol):
    if int(n_max) < 1:
        raise ValueError("n_max must be at least 1")
    if not (1e-14 <= tol <= 1e-6):
        raise ValueError("tol must lie in [1e-14, 1e-6]")


def dirichlet_eigs(q: Potential, n_max: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Dirichlet eigenvalues ``mu_1 .. mu_{n_max}`` (zeros of ``y2(1, .)``).

    Examples
    --------
    >>> np.allclose(dirichlet_eigs(Potential.zero(), 3) / np.pi ** 2, [1, 4, 9])
    True
    """
    _validate(n_max, tol)
    ns = np.arange(1, n_max + 1)
    n1 = _first_asymptotic_index(q)
    c2 = _c2(q)
    guesses = np.array([n * n * np.pi ** 2 - q.pairing("cos", n) + c2 / n ** 2 for n in ns])
    low = ns < n1
    oracle = None
    if np.any(low):
        gal = galerkin_oracle(q, "dirichlet", _oracle_modes(int(low.sum())))
        guesses[low] = gal[: int(low.sum())]
        oracle = guesses.copy()
    if q.is_real:
        guesses = guesses.real
    lam, _ = _newton(q, guesses, 1, tol, "dirichlet")
    _check_roots(lam, ns, guesses, "dirichlet", n1, oracle)
    return lam


def neumann_eigs(q: Potential, n_max: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Neumann eigenvalues ``eta_0 .. eta_{n_max}`` (zeros of ``y1'(1, .)``)."""
    _validate(n_max, tol)
    ns = np.arange(0, n_max + 1)
    n1 = _first_asymptotic_index(q)
    c2 = _c2(q)
    guesses = np.array([0.0] + [n * n * np.pi ** 2 + q.pairing("cos", n) + c2 / n ** 2
                                for n in ns[1:]], dtype=complex)
    low = ns < n1
    gal = galerkin_oracle(q, "neumann", _oracle_modes(int(low.sum())))
    guesses[low] = gal[: int(low.sum())]
    oracle = guesses.copy()
    if q.is_real:
        guesses = guesses.real
        oracle = oracle.real
    lam, _ = _newton(q, guesses, 2, tol, "neumann")
    _check_roots(lam, ns, guesses, "neumann", n1, oracle)
    return lam


# ---------------------------------------------------------------------------
# periodic / antiperiodic spectrum


@dataclass(frozen=True)
class PeriodicSpectrum:
    """``lam_0`` and the pairs ``(lam_{2n-1}, lam_{2n})`` for ``n = 1..n_max``."""

    lambda0: complex
    lo: np.ndarray
    hi: np.ndarray
    near_degenerate: tuple[int, ...] = ()

    def flat(self) -> np.ndarray:
        """``[lam_0, lam_1, lam_2, ...]``."""
        out = [self.lambda0]
        for a, b in zip(self.lo, self.hi):
            out.extend([a, b])
        return np.asarray(out)


def _uvw(M, dM):
    y1, y2, d1, d2 = M
    e1, e2, f1, f2 = dM
    return (y1 - d2, d1, y2), (e1 - f2, f1, e2)


def _model(q, lam, tol, steps):
    M, dM, _, _ = monodromy(q, lam, tol, derivative=True, steps=steps)
    (u, v, w), (du, dv, dw) = _uvw(M, dM)
    A = du * du + 4 * dv * dw
    B = 2 * u * du + 4 * (v * dw + dv * w)
    C = u * u + 4 * v * w
    return A, B, C


def _model_roots(A, B, C, real):
    disc = B * B - 4 * A * C
    if real:
        disc = np.maximum(disc, 0.0)
        s = np.sqrt(disc)
    else:
        s = np.sqrt(disc.astype(complex))
    return (-B - s) / (2 * A), (-B + s) / (2 * A)


def _pair_solve(q: Potential, centers, tol: float, starts=None):
    """Both roots of ``Delta^2 - 4`` near each centre.

    ``starts`` optionally gives accurate initial roots (pairs of arrays); the
    vertex iteration is then skipped, which matters for low clusters whose
    neighbours are close.
    """
    real = q.is_real
    c = np.asarray(centers, dtype=_dtype(q)).copy()
    itol = max(tol, 1e-14)
    _, _, _, steps = monodromy(q, c, itol)
    scale = np.maximum(1.0, np.abs(c))
    if starts is None:
        # move the centre to the vertex of the local quadratic model
        for _ in range(MAX_ITER):
            A, B, _ = _model(q, c, itol, steps)
            step = B / (2 * A)
            c = c - step
            if np.all(np.abs(step) <= tol * scale):
                break
        A, B, C = _model(q, c, itol, steps)
        d1, d2 = _model_roots(A, B, C, real)
        r1, r2 = c + d1, c + d2
    else:
        r1, r2 = (np.asarray(s, dtype=c.dtype) for s in starts)
    roots = []
    for r in (r1, r2):
        r = r.copy()
        for _ in range(MAX_ITER):
            A, B, C = _model(q, r, itol, steps)
            a, b = _model_roots(A, B, C, real)
            step = np.where(np.abs(a) <= np.abs(b), a, b)
            r = r + step
            if np.all(np.abs(step) <= tol * scale):
                break
        roots.append(r)
    # final polish with the refined integrator
    M, dM, _, _ = monodromy(q, np.concatenate(roots), itol, derivative=True)
    k = len(c)
    out = []
    for j, r in enumerate(roots):
        sub = tuple(x[j * k:(j + 1) * k] for x in M)
        dsub = tuple(x[j * k:(j + 1) * k] for x in dM)
        (u, v, w), (du, dv, dw) = _uvw(sub, dsub)
        A = du * du + 4 * dv * dw
        B = 2 * u * du + 4 * (v * dw + dv * w)
        C = u * u + 4 * v * w
        a, b = _model_roots(A, B, C, real)
        out.append(r + np.where(np.abs(a) <= np.abs(b), a, b))
    lo, hi = out
    if real:
        lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
    else:
        swap = (hi.real < lo.real) | ((hi.real == lo.real) & (hi.imag < lo.imag))
        lo, hi = np.where(swap, hi, lo), np.where(swap, lo, hi)
    return lo, hi


def _lambda0(q: Potential, tol: float):
    guess = galerkin_oracle(q, "periodic", 65)[0]
    if q.is_real:
        guess = float(np.real(guess))
    lam = np.array([guess], dtype=_dtype(q))
    itol = max(tol, 1e-14)
    for _ in range(MAX_ITER):
        M, dM, _, _ = monodromy(q, lam, itol, derivative=True)
        f = M[0] + M[3] - 2.0
        df = dM[0] + dM[3]
        step = f / df
        lam = lam - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(lam))):
            break
    return lam[0]


def periodic_eigs(q: Potential, n_max: int, tol: float = DEFAULT_TOL) -> PeriodicSpectrum:
    """Periodic (even n) and antiperiodic (odd n) eigenvalues.

    Returns ``lam_0`` and for each ``n`` the pair ``(lam_{2n-1}, lam_{2n})``
    near ``n^2 pi^2``.  Pairs whose distance is below ``1e-7`` are reported
    in ``near_degenerate``.
    """
    _validate(n_max, tol)
    ns = np.arange(1, n_max + 1)
    n1 = _first_asymptotic_index(q)
    c2 = _c2(q)
    centers = np.array([n * n * np.pi ** 2 + c2 / n ** 2 for n in ns], dtype=complex)
    low = ns < n1
    n_low = int(low.sum())
    oracle_lo = oracle_hi = None
    if n_low:
        per = galerkin_oracle(q, "periodic", 2 * _oracle_modes(n_low) + 1)
        anti = galerkin_oracle(q, "antiperiodic", 2 * _oracle_modes(n_low))
        oracle_lo = np.zeros(n_low, dtype=complex)
        oracle_hi = np.zeros(n_low, dtype=complex)
        for i in range(n_low):
            n = i + 1
            # antiperiodic: lam_1, lam_2, lam_5, lam_6, ...; periodic: lam_0, lam_3, lam_4, ...
            src = anti if n % 2 else per
            oracle_lo[i], oracle_hi[i] = src[n - 1], src[n]
            centers[i] = 0.5 * (src[n - 1] + src[n])
    if q.is_real:
        centers = centers.real
        if n_low:
            oracle_lo, oracle_hi = oracle_lo.real, oracle_hi.real
    lo = np.empty(n_max, dtype=_dtype(q))
    hi = np.empty(n_max, dtype=_dtype(q))
    if n_low:
        lo[:n_low], hi[:n_low] = _pair_solve(q, centers[:n_low], tol,
                                             starts=(oracle_lo, oracle_hi))
    if n_low < n_max:
        lo[n_low:], hi[n_low:] = _pair_solve(q, centers[n_low:], tol)
    for i, n in enumerate(ns):
        if n >= n1:
            radius = DISC_RADIUS * np.pi ** 2 * n
            if max(abs(lo[i] - centers[i]), abs(hi[i] - centers[i])) > radius:
                raise LabelingError(f"periodic cluster {n}: roots left the isolating disc")
        else:
            for got, ref in ((lo[i], oracle_lo[i]), (hi[i], oracle_hi[i])):
                if abs(got - ref) > 1e-6 * max(1.0, abs(ref)):
                    raise ConsistencyError(f"periodic cluster {n}: {got!r} disagrees with "
                                           f"Galerkin value {ref!r}")
    lam0 = _lambda0(q, tol)
    near = tuple(int(n) for n, a, b in zip(ns, lo, hi) if abs(b - a) < NEAR_DEGENERATE)
    return PeriodicSpectrum(lam0, lo, hi, near)


# ---------------------------------------------------------------------------
# Floquet exponents


@dataclass(frozen=True)
class FloquetResult:
    kappa: np.ndarray
    mismatch: np.ndarray  # |log((-1)^n y2') + log((-1)^n y1)|


def floquet_exponents(q: Potential, mu_list, tol: float = DEFAULT_TOL,
                      check: float = 1e-8) -> FloquetResult:
    """``kappa_n = log((-1)^n y2'(1, mu_n)) = -log((-1)^n y1(1, mu_n))``.

    Both expressions are evaluated with the principal logarithm; their
    mismatch is returned as a certificate.
    """
    mu = np.asarray(mu_list)
    ns = np.arange(1, len(mu) + 1)
    sign = (-1.0) ** ns
    M, _, _, _ = monodromy(q, mu, max(tol, 1e-14))
    y1 = sign * M[0]
    d2 = sign * M[3]
    if q.is_real:
        if np.any(np.real(y1) <= 0):
            k = int(np.nonzero(np.real(y1) <= 0)[0][0]) + 1
            raise BranchError(f"(-1)^n y1(1, mu_n) is not positive at n={k}")
        k1 = np.log(np.real(d2))
        k2 = -np.log(np.real(y1))
    else:
        k1 = np.log(d2.astype(complex))
        k2 = -np.log(y1.astype(complex))
    mismatch = np.abs(k1 - k2)
    if np.any(mismatch > check):
        k = int(np.argmax(mismatch)) + 1
        raise ConsistencyError(f"kappa expressions disagree at n={k} by {mismatch.max():.3g}")
    return FloquetResult(0.5 * (k1 + k2), mismatch)


# ---------------------------------------------------------------------------
# table


@dataclass
class SpectralTable:
    """All spectral data up to ``n_max``."""

    n_max: int
    lambda0: complex
    eta0: complex
    lambda_lo: np.ndarray
    lambda_hi: np.ndarray
    mu: np.ndarray
    eta: np.ndarray
    kappa: np.ndarray
    lexicographic: bool = False
    near_degenerate: tuple[int, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def tau(self) -> np.ndarray:
        return 0.5 * (self.lambda_hi + self.lambda_lo)

    @property
    def gap(self) -> np.ndarray:
        return self.lambda_hi - self.lambda_lo

    COLUMNS = ("lambda_lo", "lambda_hi", "mu", "eta", "kappa", "tau", "gap")

    def column(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name))

    def check_invariants(self, slack: float = 1e-9) -> list[str]:
        """Violated ordering / interlacing statements (empty when all hold)."""
        problems = []
        if not np.allclose(self.tau, 0.5 * (self.lambda_lo + self.lambda_hi)):
            problems.append("tau is not the pair midpoint")
        if self.lexicographic:
            for n, (a, b) in enumerate(zip(self.lambda_lo, self.lambda_hi), 1):
                if (b.real, b.imag) < (a.real, a.imag):
                    problems.append(f"pair {n} not lexicographically ordered")
            return problems
        lo, hi = np.real(self.lambda_lo), np.real(self.lambda_hi)
        mu, eta = np.real(self.mu), np.real(self.eta)
        eps = slack * np.maximum(1.0, np.abs(hi))
        if not np.real(self.lambda0) < lo[0]:
            problems.append("lambda_0 < lambda_1 fails")
        for i in range(self.n_max):
            n = i + 1
            if lo[i] > hi[i] + eps[i]:
                problems.append(f"lambda_{2 * n - 1} <= lambda_{2 * n} fails")
            if i + 1 < self.n_max and not hi[i] < lo[i + 1]:
                problems.append(f"lambda_{2 * n} < lambda_{2 * n + 1} fails")
            for name, val in (("mu", mu[i]), ("eta", eta[i])):
                if not (lo[i] - eps[i] <= val <= hi[i] + eps[i]):
                    problems.append(f"{name}_{n} outside [lambda_{2 * n - 1}, lambda_{2 * n}]")
        return problems

    # -- output ----------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["n"]
        for name in self.COLUMNS:
            header += [f"{name}_re", f"{name}_im"]
        writer.writerow(header)
        for i in range(self.n_max):
            row = [str(i + 1)]
            for name in self.COLUMNS:
                z = complex(self.column(name)[i])
                row += [_fmt(z.real), _fmt(z.imag)]
            writer.writerow(row)
        return buf.getvalue()

    def to_json(self) -> str:
        def cplx(z):
            z = complex(z)
            return [z.real, z.imag]

        data = {
            "meta": self.meta,
            "n_max": self.n_max,
            "lexicographic": self.lexicographic,
            "near_degenerate": list(self.near_degenerate),
            "lambda0": cplx(self.lambda0),
            "eta0": cplx(self.eta0),
            "rows": [
                {"n": i + 1, **{name: cplx(self.column(name)[i]) for name in self.COLUMNS}}
                for i in range(self.n_max)
            ],
        }
        return json.dumps(data, sort_keys=True, indent=1)


def _fmt(x: float) -> str:
    return "%.17g" % x


def build_table(q: Potential, n_max: int, tol: float = DEFAULT_TOL,
                validate: bool = True) -> SpectralTable:
    """Compute every spectrum and assemble a validated :class:`SpectralTable`."""
    _validate(n_max, tol)
    mu = dirichlet_eigs(q, n_max, tol)
    eta_all = neumann_eigs(q, n_max, tol)
    per = periodic_eigs(q, n_max, tol)
    kappa = floquet_exponents(q, mu, tol).kappa
    table = SpectralTable(
        n_max=int(n_max), lambda0=per.lambda0, eta0=eta_all[0], lambda_lo=per.lo,
        lambda_hi=per.hi, mu=mu, eta=eta_all[1:], kappa=kappa,
        lexicographic=not q.is_real, near_degenerate=per.near_degenerate,
        meta={"potential": q.to_json_dict(), "digest": q.digest(), "tol": tol,
              "oracle_modes": _oracle_modes(min(n_max, _first_asymptotic_index(q)))},
    )
    if validate:
        slack = max(1e-9, 1e3 * tol)
        problems = table.check_invariants(slack)
        if problems:
            raise ConsistencyError("; ".join(problems))
    return table
