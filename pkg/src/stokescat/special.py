"""Complex Gamma, the fixed logarithm branch, and the balanced series kFk.

The logarithm branch used everywhere in this package is real on the positive
real axis with its cut along the nonnegative imaginary axis, so the argument
ranges over (-3*pi/2, pi/2].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import BetaAtPole, PoleAtNonPositiveInteger, ZeroArgument

# Lanczos coefficients, g = 7, n = 9 (Godfrey's classic double-precision set).
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _near_nonpositive_int(z: complex, tol: float = 1e-12) -> bool:
    if z.real > 0.5:
        return False
    k = round(z.real)
    return k <= 0 and abs(z - k) < tol


def complex_gamma(z) -> complex:
    """Gamma(z) for complex z, Lanczos with reflection for Re z < 0.5."""
    z = complex(z)
    if _near_nonpositive_int(z):
        raise PoleAtNonPositiveInteger(f"Gamma pole at {z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    w = z - 1.0
    acc = _LANCZOS_P[0]
    for i, p in enumerate(_LANCZOS_P[1:], start=1):
        acc += p / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (w + 0.5) * cmath.exp(-t) * acc


def log_gamma(z) -> complex:
    """log Gamma(z), principal-branch-per-factor (adequate away from poles)."""
    return cmath.log(complex_gamma(z))


def branch_log(z) -> complex:
    """log z on the fixed branch: arg in (-3*pi/2, pi/2].

    Real on the positive axis; the cut lies along i*R_{>=0} and cut points are
    resolved from the Re z > 0 side.
    """
    z = complex(z)
    if z == 0:
        raise ZeroArgument("log(0)")
    a = cmath.phase(z)  # (-pi, pi]
    if a > math.pi / 2.0:
        a -= 2.0 * math.pi
    return complex(math.log(abs(z)), a)


def branch_power(z, expo) -> complex:
    """z**expo using :func:`branch_log`."""
    return cmath.exp(complex(expo) * branch_log(z))


@dataclass
class HyperParams:
    """Parameters of the balanced confluent series: equal-length alpha/beta."""

    alphas: list
    betas: list
    z: complex = 0j
    beta_tol: float = 1e-10

    def __post_init__(self):
        if len(self.alphas) != len(self.betas):
            raise BetaAtPole("alphas and betas must have equal length")
        for b in self.betas:
            b = complex(b)
            k = round(b.real)
            if k <= 0 and abs(b - k) < self.beta_tol:
                raise BetaAtPole(f"beta parameter {b} at a nonpositive integer")


def hyper_kFk(p: HyperParams, series_tail_tol: float = 1e-16,
              max_terms: int = 4000) -> complex:
    """Balanced confluent series sum_n prod (a_j)_n / prod (b_j)_n * z^n / n!.

    Entire in z, so the sum always terminates; truncation happens once three
    consecutive terms fall below ``series_tail_tol`` relative to the partial
    sum.
    """
    alphas = [complex(a) for a in p.alphas]
    betas = [complex(b) for b in p.betas]
    z = complex(p.z)
    term = 1.0 + 0.0j
    total = term
    small = 0
    for n in range(max_terms):
        num = 1.0 + 0.0j
        for a in alphas:
            num *= (a + n)
        den = 1.0 + 0.0j
        for b in betas:
            den *= (b + n)
        if den == 0:
            raise BetaAtPole("beta parameter hit a nonpositive integer in the sum")
        term = term * num / den * z / (n + 1.0)
        total += term
        if abs(term) < series_tail_tol * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    return total


def hyper_kFk_deriv(p: HyperParams, series_tail_tol: float = 1e-16,
                    max_terms: int = 4000) -> complex:
    """d/dz of :func:`hyper_kFk` at p.z, by term-wise differentiation."""
    alphas = [complex(a) for a in p.alphas]
    betas = [complex(b) for b in p.betas]
    z = complex(p.z)
    coeff = 1.0 + 0.0j  # coefficient of z^n in the series
    total = 0.0 + 0.0j
    small = 0
    for n in range(max_terms):
        num = 1.0 + 0.0j
        for a in alphas:
            num *= (a + n)
        den = 1.0 + 0.0j
        for b in betas:
            den *= (b + n)
        if den == 0:
            raise BetaAtPole("beta parameter hit a nonpositive integer in the sum")
        coeff = coeff * num / den / (n + 1.0)
        term = (n + 1.0) * coeff * z ** n
        total += term
        if abs(term) < series_tail_tol * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    return total


def kfk_asymptotic(alphas, betas, z) -> complex:
    """Gamma-prefactor large-|z| form of prod G(a)/prod G(b) * kFk(a; b; z).

    Algebraic terms carry (z e^{+/- i pi})^{-a_m} with the sign matching the
    half plane of z; the exponential term is e^z z^{sum(a)-sum(b)}.  Used only
    as a property-test target, not as a computational path.
    """
    alphas = [complex(a) for a in alphas]
    betas = [complex(b) for b in betas]
    z = complex(z)
    rot = cmath.exp(1j * math.pi) if z.imag <= 0 else cmath.exp(-1j * math.pi)
    total = 0j
    for m, am in enumerate(alphas):
        num = complex_gamma(am)
        for l, al in enumerate(alphas):
            if l != m:
                num *= complex_gamma(al - am)
        den = 1.0 + 0.0j
        for b in betas:
            den *= complex_gamma(b - am)
        total += num / den * branch_power(z * rot, -am)
    expo = sum(alphas) - sum(betas)
    total += cmath.exp(z) * branch_power(z, expo)
    return total
