"""Zero-mean periodic potentials given by finite Fourier series.

A potential is stored through its Fourier coefficients ``q_hat[n]`` for
``0 < |n| <= M`` with the convention ``q(x) = sum_n q_hat[n] exp(2 pi i n x)``.

Inner products follow ``<f, g> = int_0^1 f(x) conj(g(x)) dx``; in particular
``<q, exp(2 pi i n x)> = q_hat[n]``, and the cosine/sine pairings are the
literal integrals ``int q(x) cos(2 pi n x) dx`` and ``int q(x) sin(2 pi n x) dx``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

__all__ = ["Potential", "FourierSeries", "to_complex"]


def _is_zero(value) -> bool:
    return value == 0


def to_complex(value) -> complex:
    """``complex(value)`` that also accepts sympy Gaussian rationals."""
    if hasattr(value, "x") and hasattr(value, "y"):
        return complex(float(value.x), float(value.y))
    return complex(value)


@dataclass(frozen=True)
class FourierSeries:
    """Trigonometric polynomial ``sum_{|n| <= M} c[n] exp(2 pi i n x)``.

    Unlike :class:`Potential` the mean coefficient is allowed; this is the
    value type returned when differential densities are evaluated.
    """

    coeffs: np.ndarray  # index k holds frequency k - bandwidth
    bandwidth: int

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, complex]) -> "FourierSeries":
        M = max((abs(n) for n in coeffs), default=0)
        arr = np.zeros(2 * M + 1, dtype=complex)
        for n, c in coeffs.items():
            arr[n + M] += c
        return cls(arr, M)

    def coefficient(self, n: int) -> complex:
        if abs(n) > self.bandwidth:
            return 0j
        return complex(self.coeffs[n + self.bandwidth])

    @property
    def mean(self) -> complex:
        return self.coefficient(0)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        freqs = np.arange(-self.bandwidth, self.bandwidth + 1)
        phase = np.exp(2j * np.pi * np.multiply.outer(x, freqs))
        return phase @ self.coeffs

    def __mul__(self, other: "FourierSeries") -> "FourierSeries":
        return FourierSeries(np.convolve(self.coeffs, other.coeffs),
                             self.bandwidth + other.bandwidth)


@dataclass(frozen=True)
class Potential:
    """Zero-mean trigonometric polynomial potential.

    Parameters
    ----------
    coeffs : mapping
        Frequency ``n != 0`` to Fourier coefficient.  Values may be ``complex``,
        ``float``, ``int``, :class:`fractions.Fraction` or sympy Gaussian
        rationals; exact types are kept for the exact-arithmetic paths.
    bandwidth : int, optional
        Defaults to the largest stored ``|n|`` (at least 1).
    is_real : bool, optional
        Detected from the coefficients when omitted.
    """

    coeffs: Mapping[int, object]
    bandwidth: int = 0
    is_real: bool = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        clean = {}
        for n, c in dict(self.coeffs).items():
            n = int(n)
            if n == 0:
                if not _is_zero(c):
                    raise ValueError("potential must have zero mean (q_hat[0] = 0)")
                continue
            if _is_zero(c):
                continue
            clean[n] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        M = max((abs(n) for n in clean), default=0)
        bw = int(self.bandwidth) if self.bandwidth else max(M, 1)
        if bw < M:
            raise ValueError(f"bandwidth {bw} smaller than stored frequency {M}")
        object.__setattr__(self, "bandwidth", bw)
        symmetric = all(
            to_complex(self.coefficient(-n)) == to_complex(c).conjugate()
            for n, c in clean.items()
        )
        if self.is_real is None:
            object.__setattr__(self, "is_real", symmetric)
        elif self.is_real and not symmetric:
            raise ValueError("is_real requires q_hat[-n] == conj(q_hat[n])")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "Potential":
        return cls({})

    @classmethod
    def cos(cls, k: int, amplitude=1.0) -> "Potential":
        """``amplitude * cos(2 pi k x)``."""
        half = Fraction(amplitude) / 2 if isinstance(amplitude, (int, Fraction)) else amplitude / 2
        return cls({k: half, -k: half})

    @classmethod
    def sin(cls, k: int, amplitude=1.0) -> "Potential":
        """``amplitude * sin(2 pi k x)``."""
        return cls({k: -0.5j * amplitude, -k: 0.5j * amplitude})

    @classmethod
    def from_terms(cls, terms) -> "Potential":
        """Sum of ``(kind, k, amplitude)`` terms with kind in cos/sin/exp."""
        total: dict[int, complex] = {}
        for kind, k, amp in terms:
            if kind == "cos":
                parts = {k: amp / 2, -k: amp / 2}
            elif kind == "sin":
                parts = {k: -0.5j * amp, -k: 0.5j * amp}
            elif kind == "exp":
                parts = {k: amp}
            else:
                raise ValueError(f"unknown term kind {kind!r}")
            for n, c in parts.items():
                total[n] = total.get(n, 0) + c
        return cls(total)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "Potential") -> "Potential":
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return Potential(out, max(self.bandwidth, other.bandwidth))

    def scale(self, factor) -> "Potential":
        return Potential({n: factor * c for n, c in self.coeffs.items()}, self.bandwidth)

    def translate(self, t: float) -> "Potential":
        """The potential ``x -> q(x + t)``."""
        return Potential(
            {n: to_complex(c) * np.exp(2j * np.pi * n * t) for n, c in self.coeffs.items()},
            self.bandwidth,
        )

    # -- queries -------------------------------------------------------------
    def coefficient(self, n: int):
        return self.coeffs.get(int(n), 0)

    def coefficient_array(self) -> np.ndarray:
        """Dense complex array indexed by ``n + bandwidth``."""
        M = self.bandwidth
        arr = np.zeros(2 * M + 1, dtype=complex)
        for n, c in self.coeffs.items():
            arr[n + M] = to_complex(c)
        return arr

    def as_series(self) -> FourierSeries:
        return FourierSeries(self.coefficient_array(), self.bandwidth)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_even(self) -> bool:
        """``q(x) == q(1 - x)``, i.e. ``q_hat[-n] == q_hat[n]``."""
        return all(to_complex(self.coefficient(-n)) == to_complex(c) for n, c in self.coeffs.items())

    def sobolev_norm(self, N: int = 0) -> float:
        """``(sum_{n != 0} |n|^(2N) |q_hat[n]|^2)^(1/2)``."""
        return float(np.sqrt(sum(abs(n) ** (2 * N) * abs(to_complex(c)) ** 2
                                 for n, c in self.coeffs.items())))

    def l1_coefficient_norm(self) -> float:
        """``sum |q_hat[n]|``, an upper bound for ``sup |q|``."""
        return float(sum(abs(to_complex(c)) for c in self.coeffs.values()))

    def pairing(self, mode: str, n: int) -> complex:
        """Pair ``q`` against ``exp(2 pi i n x)``, ``cos(2 pi n x)`` or ``sin(2 pi n x)``.

        Returns ``q_hat[n]``, ``(q_hat[n] + q_hat[-n]) / 2`` or
        ``(q_hat[-n] - q_hat[n]) / (2i)`` respectively.
        """
        if mode == "exp":
            return to_complex(self.coefficient(n))
        if n == 0:
            raise ValueError("cos/sin pairings need n >= 1")
        a, b = to_complex(self.coefficient(n)), to_complex(self.coefficient(-n))
        if mode == "cos":
            return (a + b) / 2
        if mode == "sin":
            return (b - a) / 2j
        raise ValueError(f"unknown pairing mode {mode!r}")

    def evaluate(self, x):
        return self.as_series().evaluate(x)

    def derivative(self, k: int = 1) -> "Potential":
        """Termwise ``d^k/dx^k``: ``q_hat[n] -> (2 pi i n)^k q_hat[n]``."""
        if k == 0:
            return self
        return Potential(
            {n: (2j * np.pi * n) ** k * to_complex(c) for n, c in self.coeffs.items()},
            self.bandwidth,
            is_real=self.is_real,
        )

    # -- serialisation -------------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            # adding 0.0 folds -0.0 into 0.0 so equal potentials serialise identically
            "coeffs": [{"n": n, "re": to_complex(c).real + 0.0, "im": to_complex(c).imag + 0.0}
                       for n, c in self.coeffs.items()],
            "real": bool(self.is_real),
            "bandwidth": int(self.bandwidth),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Potential":
        coeffs = {int(e["n"]): complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
                  for e in data["coeffs"]}
        coeffs = {n: (c.real if c.imag == 0 else c) for n, c in coeffs.items()}
        real = data.get("real")
        return cls(coeffs, int(data.get("bandwidth", 0)),
                   is_real=bool(real) if real is not None else None)

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        return cls.from_json_dict(json.loads(text))

    def digest(self) -> str:
        """Short stable hash used as provenance in reports."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def __hash__(self):
        return hash(tuple((n, to_complex(c)) for n, c in self.coeffs.items()))

    def __eq__(self, other):
        if not isinstance(other, Potential):
            return NotImplemented
        return (self.bandwidth == other.bandwidth
                and {n: to_complex(c) for n, c in self.coeffs.items()}
                == {n: to_complex(c) for n, c in other.coeffs.items()})
