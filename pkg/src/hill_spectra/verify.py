"""Residual analysis of the spectral asymptotics.

For each index ``n`` in a window the computed spectral quantity is compared
with the deterministic part of its asymptotic formula.  The residual is
scaled by ``n^e`` with ``e`` the decay exponent promised by the error term
(``N + 1`` in general, ``N + 1/2`` for the eigenvalue pair whose error sits
under a square root).  A report passes when

* the least-squares slope of ``log|residual|`` against ``log n`` is at most
  ``-e + slack``, and
* every scaled residual is bounded by ``cap``.

Residuals below the numerical floor are excluded from the fit.  A window in
which every residual is at the floor is reported as inconclusive; a window
that reaches the floor after fewer than three resolved points is fitted with
the floor as an upper bound at the window end; when that bound is too loose
to confirm the rate the report is inconclusive.
"""
from __future__ import annotations

import csv
import functools
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import AsymptoticModel, DomainError
from .potential import Potential
from .spectra import dirichlet_eigs, floquet_exponents, neumann_eigs, periodic_eigs

__all__ = [
    "THEOREM_IDS",
    "ResidualRow",
    "ResidualReport",
    "ScanResult",
    "EvenSuiteReport",
    "verify_theorem",
    "uniformity_scan",
    "even_potential_suite",
    "spectral_data",
    "thread_count",
    "DomainError",
]

THEOREM_IDS = ("1", "2", "3", "4", "4mu", "4eta", "B", "gap", "cor32")
VERIFY_TOL = 1e-14
FLOOR_FACTOR = 10.0
DEFAULT_WINDOW = (6, 48)


@dataclass(frozen=True)
class _Spectra:
    mu: np.ndarray
    eta: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    kappa: np.ndarray | None


@functools.lru_cache(maxsize=64)
def _spectral_data(q: Potential, n_max: int, tol: float, need: frozenset) -> _Spectra:
    mu = dirichlet_eigs(q, n_max, tol) if "mu" in need or "kappa" in need else None
    eta = neumann_eigs(q, n_max, tol)[1:] if "eta" in need else None
    lo = hi = None
    if "pair" in need:
        per = periodic_eigs(q, n_max, tol)
        lo, hi = per.lo, per.hi
    kappa = floquet_exponents(q, mu, tol).kappa if "kappa" in need else None
    return _Spectra(mu, eta, lo, hi, kappa)


def spectral_data(q: Potential, n_max: int, tol: float = VERIFY_TOL, need=("mu", "eta", "pair", "kappa")):
    """Memoised spectra used by the verification routines."""
    return _spectral_data(q, int(n_max), float(tol), frozenset(need))


_NEEDS = {
    "1": ("kappa",), "2": ("pair",), "3": ("pair",), "4": ("mu", "eta"), "4mu": ("mu",),
    "4eta": ("eta",), "B": ("pair",), "gap": ("pair",), "cor32": ("mu", "pair"),
}


def thread_count() -> int:
    """Worker cap from ``HILL_SPECTRA_THREADS`` (default: CPU count)."""
    env = os.environ.get("HILL_SPECTRA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ResidualRow:
    n: int
    computed: tuple
    predicted: tuple
    residual: float
    scaled_residual: float
    at_floor: bool


def _fmt(x: float) -> str:
    return "%.17g" % x


@dataclass
class ResidualReport:
    """Per-index residuals with a decay-slope summary and verdict."""

    theorem_id: str
    N: int
    potential: dict
    digest: str
    rows: list[ResidualRow]
    exponent: float
    slope: float | None
    max_scaled: float
    l2_sum: float
    status: str  # "pass" | "fail" | "inconclusive"
    tolerances: dict = field(default_factory=dict)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        k = len(self.rows[0].computed) if self.rows else 1
        header = ["n"]
        for name in ("computed", "predicted"):
            for i in range(k):
                header += [f"{name}_{i}_re", f"{name}_{i}_im"]
        header += ["residual", "scaled_residual", "at_floor"]
        w.writerow(header)
        for r in self.rows:
            line = [str(r.n)]
            for vals in (r.computed, r.predicted):
                for z in vals:
                    z = complex(z)
                    line += [_fmt(z.real), _fmt(z.imag)]
            line += [_fmt(r.residual), _fmt(r.scaled_residual), str(int(r.at_floor))]
            w.writerow(line)
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "N": self.N,
            "digest": self.digest,
            "exponent": self.exponent,
            "slope": self.slope,
            "max_scaled_residual": self.max_scaled,
            "l2_partial_sum": self.l2_sum,
            "status": self.status,
            "note": self.note,
            "tolerances": self.tolerances,
        }

    def to_json(self) -> str:
        data = self.summary()
        data["potential"] = self.potential
        data["rows"] = [
            {"n": r.n, "residual": r.residual, "scaled_residual": r.scaled_residual,
             "at_floor": r.at_floor,
             "computed": [[complex(z).real, complex(z).imag] for z in r.computed],
             "predicted": [[complex(z).real, complex(z).imag] for z in r.predicted]}
            for r in self.rows
        ]
        return json.dumps(data, sort_keys=True, indent=1)


def _fit_slope(ns, res):
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(res, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


def _match_pair(lo, hi, p1, p2) -> float:
    return min(max(abs(lo - p1), abs(hi - p2)), max(abs(lo - p2), abs(hi - p1)))


def _check_theorem(q: Potential, theorem_id: str):
    if theorem_id not in THEOREM_IDS:
        raise DomainError(f"unknown theorem id {theorem_id!r}; choose from {THEOREM_IDS}")
    if theorem_id in ("B", "gap", "cor32") and not q.is_real:
        raise DomainError(f"theorem {theorem_id} requires a real potential")


def verify_theorem(q: Potential, theorem_id: str, N: int = 0, n_range=DEFAULT_WINDOW,
                   tol: float = VERIFY_TOL, cap: float | None = None, slack: float = 0.5,
                   floor_factor: float = FLOOR_FACTOR) -> ResidualReport:
    """Scaled residuals of one asymptotic statement over ``n_range``.

    Parameters
    ----------
    theorem_id : str
        ``"1"`` Floquet exponents, ``"2"`` eigenvalue pairs (unordered
        matching), ``"3"`` midpoints, ``"4"`` Dirichlet and Neumann (worst of
        both), ``"4mu"``/``"4eta"`` one of them, ``"B"`` real pair split,
        ``"gap"`` gap lengths, ``"cor32"`` midpoint minus Dirichlet.
    N : int
        Regularity index of the expansion.
    n_range : (int, int)
        Inclusive window.
    cap : float, optional
        Bound for scaled residuals; defaults to ``10 max(1, ||q||^2)``.
    """
    _check_theorem(q, theorem_id)
    if N < 0:
        raise DomainError("N must be nonnegative")
    n_lo, n_hi = (int(v) for v in n_range)
    if not 1 <= n_lo <= n_hi:
        raise DomainError("window must satisfy 1 <= n_lo <= n_hi")
    if cap is None:
        cap = 10.0 * max(1.0, q.sobolev_norm(0) ** 2)
    exponent = N + 0.5 if theorem_id == "2" else N + 1.0
    model = AsymptoticModel(q, N)
    data = spectral_data(q, n_hi, tol, _NEEDS[theorem_id])
    rows = []
    floors = []
    for n in range(n_lo, n_hi + 1):
        i = n - 1
        scale_lam = max(1.0, n * n * np.pi ** 2)
        floor = floor_factor * tol * scale_lam
        if theorem_id == "1":
            computed = (data.kappa[i],)
            predicted = (model.predict("kappa", n),)
            res = 2 * np.pi * n * abs(computed[0] - predicted[0])
            floor = floor_factor * tol * 2 * np.pi * n
        elif theorem_id in ("4", "4mu", "4eta"):
            comps, preds = [], []
            if theorem_id in ("4", "4mu"):
                comps.append(data.mu[i])
                preds.append(model.predict("mu", n))
            if theorem_id in ("4", "4eta"):
                comps.append(data.eta[i])
                preds.append(model.predict("eta", n))
            computed, predicted = tuple(comps), tuple(preds)
            res = max(abs(c - p) for c, p in zip(computed, predicted))
        elif theorem_id == "3":
            computed = (0.5 * (data.lo[i] + data.hi[i]),)
            predicted = (model.predict("tau", n),)
            res = abs(computed[0] - predicted[0])
        elif theorem_id in ("2", "B"):
            computed = (data.lo[i], data.hi[i])
            key = "lambda_pair" if theorem_id == "2" else "lambda_real"
            predicted = tuple(model.predict(key, n))
            res = _match_pair(data.lo[i], data.hi[i], *predicted)
        elif theorem_id == "gap":
            computed = (data.hi[i] - data.lo[i],)
            predicted = (model.predict("gap", n),)
            res = abs(abs(computed[0]) - predicted[0].real)
        else:  # cor32
            computed = (0.5 * (data.lo[i] + data.hi[i]) - data.mu[i],)
            predicted = (model.predict("tau_minus_mu", n),)
            res = abs(computed[0] - predicted[0])
        res = float(res)
        floors.append(floor)
        rows.append(ResidualRow(n, tuple(complex(c) for c in computed),
                                tuple(complex(p) for p in predicted), res,
                                float(res * n ** exponent), res <= floor))
    resolved = [r for r in rows if not r.at_floor]
    max_scaled = max((r.scaled_residual for r in rows), default=0.0)
    l2 = float(np.sqrt(sum(r.scaled_residual ** 2 for r in rows)))
    slope = None
    note = ""
    bounded = max_scaled <= cap
    if q.is_zero:
        status, note = "pass", "zero potential: predictions are exact"
    elif not resolved:
        status, note = "inconclusive", "below resolution: every residual is at the numeric floor"
    elif len(resolved) < 3 and not rows[-1].at_floor:
        status, note = ("pass" if bounded else "fail"), "too few resolved residuals for a slope fit"
    else:
        pts = [(r.n, r.residual) for r in resolved]
        if len(resolved) < 3:
            # the residual at the window end is at most the floor: fitting that
            # bound gives an upper bound on the decay slope
            last = rows[-1]
            pts.append((last.n, floors[-1]))
            note = "residuals reach the numeric floor; slope is an upper bound"
        elif any(r.at_floor for r in rows):
            note = "floor reached inside the window"
        slope = _fit_slope([p[0] for p in pts], [p[1] for p in pts])
        fast = slope <= -exponent + slack
        if not bounded:
            status = "fail"
        elif fast:
            status = "pass"
        elif len(resolved) < 3:
            # a loose upper bound cannot refute the predicted rate
            status = "inconclusive"
            note = "residuals reach the numeric floor too early to bound the decay rate"
        else:
            status = "fail"
    return ResidualReport(
        theorem_id=theorem_id, N=int(N), potential=q.to_json_dict(), digest=q.digest(),
        rows=rows, exponent=exponent, slope=slope, max_scaled=float(max_scaled), l2_sum=l2,
        status=status, note=note,
        tolerances={"tol": tol, "floor_factor": floor_factor, "slack": slack, "cap": cap,
                    "window": [n_lo, n_hi]},
    )


# ---------------------------------------------------------------------------
# families


@dataclass
class ScanResult:
    max_scaled: float
    reports: list[ResidualReport]
    cap: float

    @property
    def passed(self) -> bool:
        return self.max_scaled <= self.cap and all(r.status != "fail" for r in self.reports)

    @property
    def status(self) -> str:
        if not self.passed:
            return "fail"
        if all(r.status == "inconclusive" for r in self.reports):
            return "inconclusive"
        return "pass"


def uniformity_scan(family, theorem_id: str, N: int = 0, n_range=DEFAULT_WINDOW,
                    tol: float = VERIFY_TOL, cap: float | None = None,
                    threads: int | None = None) -> ScanResult:
    """Run :func:`verify_theorem` over a family and take the worst scaled residual.

    Work is spread over ``threads`` workers (``HILL_SPECTRA_THREADS`` by
    default); the reduction keeps the input order, so results do not depend
    on scheduling.
    """
    family = list(family)
    if not family:
        raise DomainError("uniformity_scan needs a nonempty family")
    if cap is None:
        cap = 10.0 * max(1.0, max(q.sobolev_norm(0) for q in family) ** 2)
    workers = threads or thread_count()

    def run(q):
        return verify_theorem(q, theorem_id, N, n_range, tol, cap=cap)

    if workers > 1 and len(family) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(family))) as pool:
            reports = list(pool.map(run, family))
    else:
        reports = [run(q) for q in family]
    return ScanResult(max(r.max_scaled for r in reports), reports, cap)


@dataclass
class EvenSuiteReport:
    """Checks that Dirichlet and Neumann eigenvalues fill the periodic pairs."""

    n_max: int
    mu_distance: np.ndarray
    eta_distance: np.ndarray
    pairing_distance: np.ndarray
    eta0_lambda0: float
    kappa_max: float
    threshold: float
    kappa_threshold: float

    @property
    def passed(self) -> bool:
        return (float(np.max(self.mu_distance)) <= self.threshold
                and float(np.max(self.eta_distance)) <= self.threshold
                and float(np.max(self.pairing_distance)) <= self.threshold
                and self.eta0_lambda0 <= self.threshold
                and self.kappa_max <= self.kappa_threshold)

    def to_json(self) -> str:
        return json.dumps({
            "n_max": self.n_max,
            "max_mu_distance": float(np.max(self.mu_distance)),
            "max_eta_distance": float(np.max(self.eta_distance)),
            "max_pairing_distance": float(np.max(self.pairing_distance)),
            "eta0_lambda0": self.eta0_lambda0,
            "kappa_max": self.kappa_max,
            "passed": self.passed,
        }, sort_keys=True)


def even_potential_suite(q_even: Potential, n_max: int = 24, tol: float = 1e-12,
                         threshold: float = 1e-7, kappa_threshold: float = 1e-9) -> EvenSuiteReport:
    """Even real potentials: each ``mu_n`` and ``eta_n`` is a periodic eigenvalue.

    Also checks ``eta_0 = lambda_0`` and ``kappa_n = 0``.
    """
    if not (q_even.is_real and q_even.is_even):
        raise DomainError("even_potential_suite needs a real even potential")
    mu = dirichlet_eigs(q_even, n_max, tol)
    eta_all = neumann_eigs(q_even, n_max, tol)
    per = periodic_eigs(q_even, n_max, tol)
    kappa = floquet_exponents(q_even, mu, tol).kappa
    eta = eta_all[1:]
    d_mu = np.minimum(np.abs(mu - per.lo), np.abs(mu - per.hi))
    d_eta = np.minimum(np.abs(eta - per.lo), np.abs(eta - per.hi))
    pairing = np.array([_match_pair(per.lo[i], per.hi[i], mu[i], eta[i]) for i in range(n_max)])
    return EvenSuiteReport(n_max, d_mu, d_eta, pairing, float(abs(eta_all[0] - per.lambda0)),
                           float(np.max(np.abs(kappa))), threshold, kappa_threshold)
