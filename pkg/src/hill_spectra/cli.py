"""Command-line interface ``hill-spectra``.

Subcommands: ``spectrum``, ``verify``, ``sk``, ``products``, ``wkb``.

Exit codes: 0 success or all checks pass, 1 usage/parse/solver error,
2 a verification failed, 3 only inconclusive verdicts.

Potentials are given with ``-q`` as a sum of terms

    a*cos(2*pi*k*x)    a*sin(2*pi*k*x)    (re,im)*exp(2*pi*i*k*x)

where the coefficient may contain numbers, ``i`` and ``(re,im)`` pairs
(``i*sin(2*pi*x)``, ``0.5*sin(4*pi*x)``, ``-(0,1)*exp(-2*pi*i*x)``), the
literal ``0``, a JSON object, or ``@path`` to a JSON file.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import DomainError as AsymptoticsDomainError
from .diffpoly import DepthLimitError, a_k, sk
from .odecore import IntegrationError, remainder_asymptotics_check
from .potential import Potential
from .products import (
    DomainError as ProductsDomainError,
    corollary24_residuals,
    hilbert_norm_check,
    lemma_bound_check,
    unit_perturbation,
)
from .spectra import SpectralError, build_table, dirichlet_eigs
from .verify import THEOREM_IDS, uniformity_scan, verify_theorem

__all__ = ["main", "parse_potential", "parse_range", "PotentialSyntaxError"]

log = logging.getLogger("hill_spectra")

EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3
MAX_N = 256


class PotentialSyntaxError(ValueError):
    """Malformed potential expression."""


class UsageError(ValueError):
    """Invalid command-line arguments."""


# ---------------------------------------------------------------------------
# potential mini-language


_NUMBER = re.compile(r"^[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?$")
_PAIR = re.compile(r"^\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)$")
_CALL = re.compile(r"^(cos|sin|exp)\((.*)\)$")


def _split_top(text: str, seps: str) -> list[tuple[str, str]]:
    """Split at separators outside parentheses; returns (separator, piece)."""
    pieces, depth, start, lead = [], 0, 0, ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise PotentialSyntaxError("unbalanced parentheses")
        elif depth == 0 and ch in seps:
            prev = text[:i].rstrip()
            # a sign directly after an operator or an exponent marker is unary
            if ch in "+-" and (not prev or prev[-1] in "*(+-" or re.search(r"[0-9.][eE]$", prev)):
                continue
            pieces.append((lead, text[start:i]))
            lead, start = ch, i + 1
    if depth != 0:
        raise PotentialSyntaxError("unbalanced parentheses")
    pieces.append((lead, text[start:]))
    return pieces


def _coefficient(factors: list[str]) -> complex:
    value = 1 + 0j
    for f in factors:
        f = f.strip()
        sign = 1
        while f.startswith(("-", "+")):
            sign = -sign if f[0] == "-" else sign
            f = f[1:].strip()
        if f in ("i", "j"):
            v = 1j
        elif _NUMBER.match(f):
            v = float(f)
        elif (m := _PAIR.match(f)):
            try:
                v = complex(float(m.group(1)), float(m.group(2)))
            except ValueError as exc:
                raise PotentialSyntaxError(f"bad coefficient pair {f!r}") from exc
        elif re.match(r"^[0-9.eE+-]+[ij]$", f):
            v = complex(f.replace("i", "j"))
        elif f == "pi":
            v = math.pi
        else:
            raise PotentialSyntaxError(f"unrecognised coefficient factor {f!r}")
        value *= sign * v
    return value


def _frequency(kind: str, arg: str) -> int:
    """Integer ``k`` from an argument of the form ``2*pi*k*x`` (``i`` for exp)."""
    text = arg.replace(" ", "")
    sign = 1
    while text.startswith(("-", "+")):
        sign = -sign if text[0] == "-" else sign
        text = text[1:]
    factors = text.split("*")
    counts = {"pi": 0, "x": 0, "i": 0}
    number = 1.0
    for f in factors:
        if f in counts:
            counts[f] += 1
        elif _NUMBER.match(f):
            number *= float(f)
        else:
            raise PotentialSyntaxError(f"unrecognised factor {f!r} in {kind}({arg})")
    want_i = 1 if kind == "exp" else 0
    if counts["pi"] != 1 or counts["x"] != 1 or counts["i"] != want_i:
        form = "2*pi*i*k*x" if kind == "exp" else "2*pi*k*x"
        raise PotentialSyntaxError(f"{kind} argument must look like {form}, got {arg!r}")
    k = number / 2
    if abs(k - round(k)) > 1e-12 or round(k) == 0:
        raise PotentialSyntaxError(f"{kind}({arg}) is not 1-periodic with nonzero frequency")
    return sign * int(round(k))


def parse_potential(text: str) -> Potential:
    """Parse the potential mini-language, a JSON object or ``@file.json``.

    Examples
    --------
    >>> parse_potential("2*cos(2*pi*x)").coefficient(1)
    1.0
    """
    text = text.strip()
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise PotentialSyntaxError(f"cannot read {text[1:]}: {exc}") from exc
    if text.startswith("{"):
        try:
            return Potential.from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise PotentialSyntaxError(f"bad JSON potential: {exc}") from exc
    if not text:
        raise PotentialSyntaxError("empty potential")
    terms = []
    for lead, piece in _split_top(text, "+-"):
        piece = piece.strip()
        if not piece:
            raise PotentialSyntaxError(f"empty term in {text!r}")
        factors = [f for _, f in _split_top(piece, "*")]
        call = _CALL.match(factors[-1].strip().lstrip("+-").strip())
        coeff = _coefficient(factors[:-1] if call else factors)
        if call and factors[-1].strip().startswith("-"):
            coeff = -coeff
        if lead == "-":
            coeff = -coeff
        if not call:
            if coeff != 0:
                raise PotentialSyntaxError(f"constant term {piece!r}: potentials have zero mean")
            continue
        kind, arg = call.group(1), call.group(2)
        k = _frequency(kind, arg)
        if kind == "cos":
            k = abs(k)
        elif kind == "sin" and k < 0:
            k, coeff = -k, -coeff
        amp = coeff.real if (kind != "exp" and coeff.imag == 0) else coeff
        terms.append((kind, k, amp))
    return Potential.from_terms(terms)


def parse_range(text: str) -> tuple[int, int]:
    """``"a:b"`` to an inclusive nonempty integer range."""
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"range must look like a:b, got {text!r}") from exc
    if lo < 1 or hi < lo:
        raise UsageError(f"range {text!r} must satisfy 1 <= a <= b")
    return lo, hi


def _tolerance(value: float) -> float:
    if not 1e-14 <= value <= 1e-6:
        raise UsageError(f"tol must lie in [1e-14, 1e-6], got {value}")
    return value


# ---------------------------------------------------------------------------
# output helpers


def _emit(text: str, path: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return "%.17g" % x


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    if not 1 <= args.n_max <= MAX_N:
        raise UsageError(f"--n-max must lie in [1, {MAX_N}]")
    q = parse_potential(args.potential)
    table = build_table(q, args.n_max, _tolerance(args.tol), validate=not args.no_validate)
    _emit(table.to_json() if args.format == "json" else table.to_csv(), args.output)
    if args.potential_out:
        Path(args.potential_out).write_text(q.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def _status_code(status: str) -> int:
    return {"pass": EXIT_OK, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[status]


def cmd_verify(args) -> int:
    window = parse_range(args.window)
    tol = _tolerance(args.tol)
    family = [parse_potential(p) for p in args.potential]
    if len(family) == 1:
        report = verify_theorem(family[0], args.theorem, args.N, window, tol, cap=args.cap)
        if args.csv:
            Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        text = report.to_json() if args.format == "json" else report.to_csv()
        _emit(text, args.output)
        sys.stderr.write(
            f"theorem {report.theorem_id} N={report.N}: {report.status}"
            f" slope={report.slope} max_scaled={report.max_scaled:.3e}\n")
        return _status_code(report.status)
    scan = uniformity_scan(family, args.theorem, args.N, window, tol, cap=args.cap)
    summary = {"theorem": args.theorem, "N": args.N, "cap": scan.cap,
               "max_scaled_residual": scan.max_scaled, "status": scan.status,
               "members": [r.summary() for r in scan.reports]}
    _emit(json.dumps(summary, sort_keys=True, indent=1), args.output)
    return _status_code(scan.status)


def cmd_sk(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be positive")
    poly = sk(args.k)
    lines = [f"s_{args.k} = {poly}"]
    if args.potential:
        q = parse_potential(args.potential)
        v = a_k(args.k, q)
        lines.append(f"a_{args.k} = {_fmt(v.real)} {'+' if v.imag >= 0 else '-'} {_fmt(abs(v.imag))}i")
    _emit("\n".join(lines), args.output)
    return EXIT_OK


def cmd_products(args) -> int:
    out = []
    status = EXIT_OK
    ran = False
    if args.hilbert_norm_check:
        ran = True
        worst = hilbert_norm_check(args.trials, seed=args.seed)
        ok = worst <= 2 * math.pi
        out.append(f"hilbert_norm_max_ratio,{_fmt(worst)},bound,{_fmt(2 * math.pi)},{'pass' if ok else 'fail'}")
        status = status if ok else EXIT_FAIL
    if args.lemma_check:
        ran = True
        worst = lemma_bound_check(args.trials, seed=args.seed)
        ok = worst <= 1.0
        out.append(f"product_lemma_max_ratio,{_fmt(worst)},bound,1,{'pass' if ok else 'fail'}")
        status = status if ok else EXIT_FAIL
    if args.corollary24:
        ran = True
        lo, hi = parse_range(args.n)
        a = unit_perturbation(max(64, hi))
        out.append("n,f_re,f_im,scaled_residual")
        for n, f, res in corollary24_residuals(a, range(lo, hi + 1)):
            out.append(f"{n},{_fmt(f.real)},{_fmt(f.imag)},{_fmt(res)}")
    if not ran:
        raise UsageError("choose at least one of --hilbert-norm-check, --lemma-check, --corollary24")
    _emit("\n".join(out), args.output)
    return status


def cmd_wkb(args) -> int:
    q = parse_potential(args.potential)
    lo, hi = parse_range(args.n)
    mu = dirichlet_eigs(q, hi, _tolerance(args.tol))
    ns = list(range(lo, hi + 1))
    nus = [np.sqrt(complex(mu[n - 1])) for n in ns]
    rows = remainder_asymptotics_check(q, args.N, nus, ns, sign=args.sign, tol=args.tol)
    out = ["n,nu_re,nu_im,r_re,r_im,pred_re,pred_im,scaled_residual"]
    for r in rows:
        out.append(",".join([str(r.n)] + [_fmt(v) for v in (
            r.nu.real, r.nu.imag, r.r.real, r.r.imag, r.predicted.real, r.predicted.imag,
            r.residual)]))
    _emit("\n".join(out), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hill-spectra", description="Spectra of Hill operators and checks of their asymptotics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    parser.add_argument("-v", "--verbose", action="store_true")
    # global options are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomised checks")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalue table")
    p.add_argument("-q", "--potential", required=True)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output")
    p.add_argument("--potential-out", help="also write the parsed potential as JSON")
    p.add_argument("--no-validate", action="store_true", help="skip the Galerkin cross-check")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[common], help="residual analysis of an asymptotic formula")
    p.add_argument("-q", "--potential", required=True, action="append",
                   help="repeat to scan a family for uniformity")
    p.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--window", default="6:48")
    p.add_argument("--tol", type=float, default=1e-14)
    p.add_argument("--cap", type=float)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--csv", help="write the residual table here as well")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sk", parents=[common], help="recursion polynomials s_k and their means")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-q", "--potential")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sk)

    p = sub.add_parser("products", parents=[common], help="product and Hilbert-transform diagnostics")
    p.add_argument("--hilbert-norm-check", action="store_true")
    p.add_argument("--lemma-check", action="store_true")
    p.add_argument("--corollary24", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--n", default="8:64")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_products)

    p = sub.add_parser("wkb", parents=[common], help="WKB remainder against its predicted asymptotics")
    p.add_argument("-q", "--potential", required=True)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--n", default="8:32")
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_wkb)
    return parser


_HANDLED = (UsageError, PotentialSyntaxError, SpectralError, IntegrationError, DepthLimitError,
            AsymptoticsDomainError, ProductsDomainError, ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    log.info("seed=%d command=%s", args.seed, args.command)
    try:
        return args.func(args)
    except _HANDLED as exc:
        sys.stderr.write(f"hill-spectra: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
