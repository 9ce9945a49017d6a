import math

import mpmath
import numpy as np
import pytest

from stokescat.errors import BetaAtPole, PoleAtNonPositiveInteger, ZeroArgument
from stokescat.special import (HyperParams, branch_log, complex_gamma,
                               hyper_kFk, hyper_kFk_deriv, kfk_asymptotic)


def test_gamma_one():
    assert abs(complex_gamma(1.0) - 1.0) < 1e-14


def test_gamma_reflection_point():
    z = 0.3 + 0.7j
    val = complex_gamma(z) * complex_gamma(1 - z) * np.sin(np.pi * z) / np.pi
    assert abs(val - 1.0) < 1e-12


def test_gamma_vs_mpmath_strip():
    mpmath.mp.dps = 30
    rng = np.random.default_rng(0)
    for _ in range(40):
        z = complex(rng.uniform(-20, 20), rng.uniform(-50, 50))
        if abs(z.real - round(z.real)) < 0.05 and z.real <= 0.5:
            continue
        ref = complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))
        assert abs(complex_gamma(z) - ref) / abs(ref) < 1e-12


def test_gamma_half_integer():
    ref = complex(mpmath.gamma(5.5))
    assert abs(complex_gamma(5.5) - ref) / abs(ref) < 1e-12


def test_gamma_pole():
    with pytest.raises(PoleAtNonPositiveInteger):
        complex_gamma(-3.0)


def test_branch_log_values():
    assert branch_log(1.0) == 0.0
    assert abs(branch_log(-1.0) - (-1j * math.pi)) < 1e-15
    assert abs(branch_log(-1j) - (-0.5j * math.pi)) < 1e-15
    # on the cut: resolved from Re z > 0
    assert abs(branch_log(1j) - 0.5j * math.pi) < 1e-15
    with pytest.raises(ZeroArgument):
        branch_log(0.0)


def test_branch_log_exp_inverse_and_continuity():
    rng = np.random.default_rng(1)
    for _ in range(30):
        th = rng.uniform(-3 * math.pi / 2 + 0.05, math.pi / 2 - 0.05)
        z = 2.0 * complex(math.cos(th), math.sin(th))
        w = branch_log(z)
        assert abs(np.exp(w) - z) < 1e-13
        assert -3 * math.pi / 2 < w.imag <= math.pi / 2
    # d(log z) = dz/z along an arc avoiding the cut
    ths = np.linspace(-0.2, -2.0, 200)
    vals = [branch_log(1.5 * np.exp(1j * t)) for t in ths]
    diffs = np.diff(vals)
    mids = [1.5 * np.exp(1j * 0.5 * (a + b)) for a, b in zip(ths, ths[1:])]
    dz = np.diff([1.5 * np.exp(1j * t) for t in ths])
    assert max(abs(d - dz_ / m) for d, dz_, m in zip(diffs, dz, mids)) < 1e-3


def test_kfk_exponential_and_zero():
    p = HyperParams([1.2], [1.2], 0.5 + 0.3j)
    assert abs(hyper_kFk(p) - np.exp(0.5 + 0.3j)) < 1e-13
    p = HyperParams([0.4, 1.1], [0.8, 2.2], 0.0)
    assert hyper_kFk(p) == 1.0


def test_kfk_vs_extended_precision():
    mpmath.mp.dps = 50
    alphas = [0.3 + 0.2j, 1.4]
    betas = [0.9, 2.1 - 0.4j]
    z = 2.2 - 1.3j
    total = mpmath.mpc(0)
    term = mpmath.mpc(1)
    for n in range(200):
        total += term
        num = mpmath.mpf(1)
        fac = mpmath.mpc(1)
        for a in alphas:
            fac *= (mpmath.mpc(a) + n)
        for b in betas:
            fac /= (mpmath.mpc(b) + n)
        term = term * fac * mpmath.mpc(z) / (n + 1)
    ref = complex(total)
    val = hyper_kFk(HyperParams(alphas, betas, z))
    assert abs(val - ref) / abs(ref) < 1e-10


def test_kfk_beta_pole():
    with pytest.raises(BetaAtPole):
        HyperParams([0.3], [-2.0], 1.0)


def test_kfk_derivative():
    p0 = HyperParams([0.7, 1.3], [1.1, 0.9], 0.4 + 0.2j)
    eps = 1e-6
    num = (hyper_kFk(HyperParams(p0.alphas, p0.betas, p0.z + eps))
           - hyper_kFk(HyperParams(p0.alphas, p0.betas, p0.z - eps))) / (2 * eps)
    assert abs(hyper_kFk_deriv(p0) - num) < 1e-8


def test_kfk_asymptotic_form():
    # large |z| on a lower-half-plane ray: 5% agreement at |z| = 80
    alphas = [0.25, 1.1]
    betas = [1.3, 0.85]
    z = 80.0 * np.exp(-1j * np.pi / 4)
    pref = (complex_gamma(alphas[0]) * complex_gamma(alphas[1])
            / (complex_gamma(betas[0]) * complex_gamma(betas[1])))
    lhs = pref * hyper_kFk(HyperParams(alphas, betas, z), series_tail_tol=1e-18)
    rhs = kfk_asymptotic(alphas, betas, z)
    assert abs(lhs - rhs) / abs(rhs) < 0.05
