"""Fundamental solutions, discriminant and WKB remainders of Hill's equation.

Solves ``-y'' + q y = lam y`` on [0, 1] for the fundamental matrix
``M(x, lam) = [[y1, y2], [y1', y2']]`` with ``M(0) = I``.

The integrator is a sixth-order Magnus method with three Gauss nodes per
step.  For this equation the Magnus exponent of each step is a traceless
2x2 matrix, so its exponential is evaluated in closed form and every step
propagator is exactly unimodular up to rounding.  Oscillations at large
``lam`` therefore cost accuracy only through the step size relative to
``sqrt(lam)``, not through accumulated amplitude or phase drift.  Errors are
controlled by step doubling with a Richardson estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _magnus as mg
from .diffpoly import a_k, eval_density, sk
from .potential import FourierSeries, Potential

__all__ = [
    "IntegrationError",
    "FundamentalSolution",
    "WkbSolution",
    "RemainderRow",
    "monodromy",
    "integrate_fundamental",
    "discriminant",
    "dlambda",
    "wkb",
    "wkb_prediction",
    "remainder_asymptotics_check",
    "solve_inhomogeneous",
    "remainder_forcing",
    "lemma_bound",
    "l2_norm",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12
MIN_TOL, MAX_TOL = 1e-14, 1e-6
MAX_STEPS = 2 ** 17


class IntegrationError(RuntimeError):
    """Step refinement failed to reach the requested tolerance.

    Attributes
    ----------
    x : float
        First grid point where the coarse and refined solutions disagree by
        more than the tolerance.
    """

    def __init__(self, message: str, x: float, lam=None):
        super().__init__(f"{message} (first divergence at x={x:.6g})")
        self.x = x
        self.lam = lam


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not (MIN_TOL <= tol <= MAX_TOL):
        raise ValueError(f"tol must lie in [{MIN_TOL:g}, {MAX_TOL:g}], got {tol:g}")
    return tol


def _as_lams(q: Potential, lams):
    arr = np.atleast_1d(np.asarray(lams))
    if q.is_real and not np.iscomplexobj(arr):
        return arr.astype(float)
    if np.iscomplexobj(arr) and q.is_real and np.all(arr.imag == 0):
        return arr.real.astype(float)
    return arr.astype(complex)


def initial_steps(q: Potential, lams, tol: float) -> int:
    """Heuristic step count: about four steps per unit of the local frequency."""
    lams = np.atleast_1d(lams)
    nu = float(np.max(np.sqrt(np.abs(lams)))) if lams.size else 0.0
    qmax = q.l1_coefficient_norm()
    omega = max(1.0, nu, 2 * np.pi * q.bandwidth, math.sqrt(qmax))
    m = 4.0 * omega * (1e-13 / tol) ** (1.0 / 6.0)
    return int(2 ** max(5, math.ceil(math.log2(max(m, 1.0)))))


def _propagate(q, lams, m, derivative):
    qv = mg.node_values(q, m)
    if not q.is_real or np.iscomplexobj(lams):
        qv = qv.astype(complex)
    Phi, dPhi = mg.step_propagators(qv, lams, 1.0 / m, derivative)
    return mg.tree_product(Phi, dPhi)


def _scaled_error(M1, M2, lams):
    nu = np.maximum(1.0, np.sqrt(np.abs(lams)))
    diff = np.maximum.reduce([np.abs(M1[0] - M2[0]), nu * np.abs(M1[1] - M2[1]),
                              np.abs(M1[2] - M2[2]) / nu, np.abs(M1[3] - M2[3])])
    size = np.maximum.reduce([np.abs(M2[0]), nu * np.abs(M2[1]),
                              np.abs(M2[2]) / nu, np.abs(M2[3]), np.ones_like(nu)])
    return diff / size


def _divergence_point(q, lam, m, tol):
    """First coarse grid point where ``m`` and ``2m`` step trajectories split."""
    lam_arr = np.atleast_1d(lam)
    coarse_phi, _ = mg.step_propagators(_node_vals(q, m, lam_arr), lam_arr, 1.0 / m)
    fine_phi, _ = mg.step_propagators(_node_vals(q, 2 * m, lam_arr), lam_arr, 0.5 / m)
    coarse = mg.cumulative_product(coarse_phi)
    fine = mg.cumulative_product(fine_phi)
    fine = tuple(x[::2] for x in fine)
    err = _scaled_error(tuple(x[:, 0] for x in coarse), tuple(x[:, 0] for x in fine),
                        np.full(m + 1, lam_arr[0]))
    bad = np.nonzero(err > tol)[0]
    return float(bad[0]) / m if bad.size else 1.0


def _node_vals(q, m, lams):
    qv = mg.node_values(q, m)
    if not q.is_real or np.iscomplexobj(lams):
        qv = qv.astype(complex)
    return qv


def monodromy(q: Potential, lams, tol: float = DEFAULT_TOL, derivative: bool = False,
              steps: int | None = None):
    """Batch evaluation of ``M(1, lam)`` (and ``dM/dlam``).

    Parameters
    ----------
    q : Potential
    lams : array_like
        Spectral parameters.
    tol : float
        Target scaled error of the entries.
    derivative : bool
        Also return the lam-derivative of every entry.
    steps : int, optional
        Fixed step count; skips the refinement loop.

    Returns
    -------
    M : tuple of 4 arrays
        ``(y1, y2, y1', y2')`` at ``x = 1``.
    dM : tuple of 4 arrays or None
    err : array
        Estimated scaled error per lam (zeros when ``steps`` is given).
    steps : int
        Step count used.
    """
    tol = _check_tol(tol)
    lams = _as_lams(q, lams)
    if steps is not None:
        M, dM = _propagate(q, lams, int(steps), derivative)
        return M, dM, np.zeros(lams.shape), int(steps)
    m = initial_steps(q, lams, tol)
    if 2 * m > MAX_STEPS:
        k = int(np.argmax(np.abs(lams)))
        raise IntegrationError(f"lambda={lams[k]!r} needs more than {MAX_STEPS} steps", 0.0, lams[k])
    M_prev, _ = _propagate(q, lams, m, False)
    while True:
        M, dM = _propagate(q, lams, 2 * m, derivative)
        err = _scaled_error(M_prev, M, lams) / 63.0
        if np.all(err <= tol):
            return M, dM, err, 2 * m
        if 4 * m > MAX_STEPS:
            k = int(np.argmax(err))
            x = _divergence_point(q, lams[k], m, 63.0 * tol)
            raise IntegrationError(f"no convergence for lambda={lams[k]!r} with "
                                   f"{2 * m} steps (err {err[k]:.3g})", x, lams[k])
        m *= 2
        M_prev = M


@dataclass(frozen=True)
class FundamentalSolution:
    """Fundamental solutions and derivatives at ``x = 1``."""

    lam: complex
    y1_1: complex
    y2_1: complex
    dy1_1: complex
    dy2_1: complex
    wronskian_defect: float
    tol_used: float
    steps: int = 0

    @property
    def discriminant(self) -> complex:
        return self.y1_1 + self.dy2_1

    def as_tuple(self):
        return (self.y1_1, self.y2_1, self.dy1_1, self.dy2_1)


def integrate_fundamental(q: Potential, lam, tol: float = DEFAULT_TOL) -> FundamentalSolution:
    """Fundamental solutions ``y1, y2`` and their derivatives at ``x = 1``.

    Examples
    --------
    >>> fs = integrate_fundamental(Potential.zero(), np.pi ** 2)
    >>> round(fs.y1_1.real, 12), round(abs(fs.y2_1), 12)
    (-1.0, 0.0)
    """
    M, _, _, m = monodromy(q, [lam], tol)
    y1, y2, d1, d2 = (x[0] for x in M)
    defect = abs(y1 * d2 - d1 * y2 - 1.0)
    cast = complex
    return FundamentalSolution(cast(lam), cast(y1), cast(y2), cast(d1), cast(d2),
                               float(defect), tol, m)


def discriminant(q: Potential, lam, tol: float = DEFAULT_TOL) -> complex:
    """``Delta(lam) = y1(1, lam) + y2'(1, lam)``."""
    return integrate_fundamental(q, lam, tol).discriminant


def dlambda(q: Potential, lam, tol: float = DEFAULT_TOL):
    """lam-derivatives ``(d y1, d y2, d y1', d y2')`` at ``x = 1``.

    The derivative of each Magnus step is taken analytically, which is the
    discrete counterpart of the variational equation
    ``-(dy)'' + (q - lam) dy = y`` with zero initial data.
    """
    _, dM, _, _ = monodromy(q, [lam], tol, derivative=True)
    return tuple(complex(x[0]) for x in dM)


# ---------------------------------------------------------------------------
# WKB special solutions


def _integral_series(series: FourierSeries, x):
    """``int_0^x`` of a trigonometric polynomial (mean allowed)."""
    x = np.asarray(x, dtype=float)
    M = series.bandwidth
    out = series.mean * x
    for k in range(-M, M + 1):
        c = series.coeffs[k + M]
        if k == 0 or c == 0:
            continue
        out = out + c * (np.exp(2j * np.pi * k * x) - 1.0) / (2j * np.pi * k)
    return out


@dataclass(frozen=True)
class WkbSolution:
    """``z_N``, ``w_N`` and the scaled remainder ``r_N`` at ``x = 1``."""

    N: int
    nu: complex
    z_1: complex
    dz_1: complex
    w_1: complex
    r_1: complex
    dr_1: complex
    alpha0: complex

    def consistency_defect(self) -> float:
        """``|z_1 - w_1 - r_1 / (2 i nu)^(N+1)|``."""
        return abs(self.z_1 - self.w_1 - self.r_1 / (2j * self.nu) ** (self.N + 1))


def _check_nu(nu) -> complex:
    nu = complex(nu)
    if nu == 0:
        raise ValueError("nu must be nonzero")
    return nu


def wkb(q: Potential, N: int, nu, tol: float = DEFAULT_TOL) -> WkbSolution:
    """WKB special solution ``z_N(x, nu) = y1 + alpha_N(0, nu) y2`` at ``x = 1``.

    ``alpha_N(x, nu) = i nu + sum_{k=1}^N s_k(x) / (2 i nu)^k`` and
    ``w_N(1, nu) = exp(i nu + sum_k a_k / (2 i nu)^k)`` use the exact means
    ``a_k`` rather than quadrature.  The remainder is
    ``r_N = (2 i nu)^(N+1) (z_N - w_N)``.
    """
    nu = _check_nu(nu)
    if N < 0:
        raise ValueError("N must be nonnegative")
    t = 2j * nu
    alpha0 = 1j * nu
    phase = 1j * nu
    for k in range(1, N + 1):
        dens = eval_density(sk(k), q)
        alpha0 += complex(dens.evaluate(0.0)) / t ** k
        phase += a_k(k, q) / t ** k
    lam = nu * nu
    M, _, _, _ = monodromy(q, [lam], tol)
    y1, y2, d1, d2 = (complex(x[0]) for x in M)
    z1 = y1 + alpha0 * y2
    dz1 = d1 + alpha0 * d2
    w1 = np.exp(phase)
    scale = t ** (N + 1)
    return WkbSolution(N, nu, z1, dz1, complex(w1), complex((z1 - w1) * scale),
                       complex((dz1 - alpha0 * w1) * scale), alpha0)


def wkb_prediction(q: Potential, N: int, n: int, sign: int = 1):
    """Leading asymptotics of ``r_N(1, +-nu_n)`` and ``r_N'(1, +-nu_n)``.

    Returns the deterministic part for ``nu_n = n pi + o(1/n)``::

        r  ~ (-1)^n a_{N+1} - (-1)^n (+-2 i n pi)^N qint +- (-1)^n a_{N+2} / (2 i n pi)
        r' ~ +- i n pi (-1)^n [a_{N+1} + (+-2 i n pi)^N qint] + (-1)^n a_{N+2} / 2

    with ``qint = int q(x) exp(+-2 i n pi x) dx = q_hat[-+n]``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    par = (-1) ** n
    qint = complex(q.coefficient(-sign * n))
    a1 = a_k(N + 1, q)
    a2 = a_k(N + 2, q)
    w = sign * 2j * n * np.pi
    r = par * a1 - par * w ** N * qint + sign * par * a2 / (2j * n * np.pi)
    dr = sign * 1j * n * np.pi * par * (a1 + w ** N * qint) + par * a2 / 2
    return complex(r), complex(dr)


@dataclass(frozen=True)
class RemainderRow:
    n: int
    nu: complex
    r: complex
    predicted: complex
    residual: float  # n * |r - predicted|


def remainder_asymptotics_check(q: Potential, N: int, nu_seq, ns=None, sign: int = 1,
                                tol: float = DEFAULT_TOL) -> list[RemainderRow]:
    """Scaled residuals ``n |r_N(1, +-nu_n) - prediction|``.

    Parameters
    ----------
    nu_seq : sequence of complex
        ``nu_n`` close to ``n pi`` (for instance ``sqrt(mu_n)``).
    ns : sequence of int, optional
        Indices; inferred as ``round(Re nu / pi)`` when omitted.
    sign : {+1, -1}
        Evaluate at ``+nu_n`` or ``-nu_n``.
    """
    nus = [complex(v) for v in nu_seq]
    if ns is None:
        ns = [int(round(v.real / np.pi)) for v in nus]
    rows = []
    for n, nu in zip(ns, nus):
        sol = wkb(q, N, sign * nu, tol)
        pred, _ = wkb_prediction(q, N, n, sign)
        rows.append(RemainderRow(n, nu, sol.r_1, pred, float(n * abs(sol.r_1 - pred))))
    return rows


# ---------------------------------------------------------------------------
# inhomogeneous problem and the a priori bound


def _trajectory(q, lam, m):
    lam_arr = _as_lams(q, [lam])
    Phi, _ = mg.step_propagators(_node_vals(q, m, lam_arr), lam_arr, 1.0 / m)
    traj = mg.cumulative_product(Phi)
    return tuple(x[:, 0] for x in traj)


def _simpson(values, h):
    return h / 3.0 * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum()
                      + 2.0 * values[2:-1:2].sum())


def _grid_size(nu):
    m = max(4000, int(40 * abs(nu)) + 1)
    return m + (m % 2)


def solve_inhomogeneous(q: Potential, nu, forcing, steps: int | None = None):
    """Solve ``-r'' + q r - nu^2 r = -g`` with ``r(0) = r'(0) = 0``.

    Uses ``r(x) = int_0^x (y1(t) y2(x) - y1(x) y2(t)) g(t) dt`` with the
    fundamental solutions tabulated on a uniform grid and Simpson's rule.

    Parameters
    ----------
    forcing : callable
        Vectorised ``g(t)``.
    steps : int, optional
        Even number of grid intervals.

    Returns
    -------
    (r(1), r'(1))
    """
    nu = complex(nu)
    m = steps or _grid_size(nu)
    if m % 2:
        raise ValueError("steps must be even")
    y1, y2, d1, d2 = _trajectory(q, nu * nu, m)
    t = np.linspace(0.0, 1.0, m + 1)
    g = np.asarray(forcing(t), dtype=complex)
    h = 1.0 / m
    I1 = _simpson(y1 * g, h)
    I2 = _simpson(y2 * g, h)
    r1 = y2[-1] * I1 - y1[-1] * I2
    dr1 = d2[-1] * I1 - d1[-1] * I2
    return complex(r1), complex(dr1)


def remainder_forcing(q: Potential, N: int, nu):
    """``f_N(x, nu)`` of the remainder equation as a vectorised callable.

    ``f_N = [s_{N+1} - sum_{k=1}^N (sum_{l=k}^N s_{N+k-l} s_l) / (2 i nu)^k] w_N``
    with ``w_N(x) = exp(int_0^x alpha_N)``.
    """
    nu = _check_nu(nu)
    t = 2j * nu
    dens = {k: eval_density(sk(k), q) for k in range(1, N + 2)}

    def f(x):
        x = np.asarray(x, dtype=float)
        expo = 1j * nu * x
        for k in range(1, N + 1):
            expo = expo + _integral_series(dens[k], x) / t ** k
        w = np.exp(expo)
        val = dens[N + 1].evaluate(x)
        for k in range(1, N + 1):
            acc = 0
            for l in range(k, N + 1):
                acc = acc + dens[N + k - l].evaluate(x) * dens[l].evaluate(x)
            val = val - acc / t ** k
        return val * w

    return f


def lemma_bound(q: Potential, nu, h_l2: float, derivative: bool = False) -> float:
    """A priori bound for the solution of ``-r'' + q r - nu^2 r = -h e^{i nu x}``.

    With ``R = exp(|Im nu| + ||q||)``::

        |r|  <= (R^2/|nu| + 4 R^3/|nu|^2 (1 + 1/|nu|)) ||h||
        |r'| <= (R^2 + 2 (1 + ||q||) R^3/|nu| (1 + 1/|nu|)) ||h||
    """
    nu = _check_nu(nu)
    a = abs(nu)
    qn = q.sobolev_norm(0)
    R = math.exp(abs(nu.imag) + qn)
    if derivative:
        return (R ** 2 + 2 * (1 + qn) * R ** 3 / a * (1 + 1 / a)) * h_l2
    return (R ** 2 / a + 4 * R ** 3 / a ** 2 * (1 + 1 / a)) * h_l2


def l2_norm(func, m: int = 4000) -> float:
    """L^2[0, 1] norm of a vectorised callable by Simpson's rule."""
    m += m % 2
    t = np.linspace(0.0, 1.0, m + 1)
    return math.sqrt(max(_simpson(np.abs(func(t)) ** 2, 1.0 / m).real, 0.0))
