import math

import numpy as np
import pytest

from stokescat.errors import ResonantSystem
from stokescat.linalg import expm, norm
from stokescat.oracle import (LinearSystem, canonical_solution, classical_system,
                              connection, frobenius_solution, quantum_system,
                              stokes_and_connection, stokes_minus, stokes_plus,
                              taylor_transport, verify_monodromy)
from stokescat.special import complex_gamma

_2PII = 2j * math.pi


def _rand_herm(rng, n, scale=0.7):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2.0


def test_zero_residue_everything_trivial():
    sys = LinearSystem(np.array([0.0, 1.0]), np.zeros((2, 2)))
    z = 2.0 * np.exp(-1j * np.pi / 3)
    f = canonical_solution(sys, +1, z)
    assert norm(f - np.diag(np.exp(1j * sys.u * z))) < 1e-12
    sd = stokes_and_connection(sys)
    for m in (sd.Splus, sd.Sminus, sd.C):
        assert norm(m - np.eye(2)) < 1e-11
    assert abs(verify_monodromy(sd, np.zeros((2, 2)))) < 1e-11


def test_diagonal_residue():
    a = np.diag([0.4 + 0.1j, -0.3])
    sys = classical_system(np.array([0.0, 1.0]), a)
    z = 3.0 * np.exp(-1j * np.pi / 4)
    from stokescat.special import branch_log
    f = canonical_solution(sys, +1, z)
    want = np.diag(np.exp(1j * sys.u * z)
                   * np.exp(-np.diag(a) / _2PII * branch_log(z)))
    assert norm(f - want) < 1e-11
    # F0 for a diagonal residue is the exact power z^{-A/(2 pi i)}
    f0 = frobenius_solution(sys, 0.3)
    want0 = np.diag(np.exp(-np.diag(a) / _2PII * branch_log(0.3)))
    assert norm(f0 - want0) < 1e-12
    sd = stokes_and_connection(sys)
    assert norm(sd.Splus - expm(0.5 * sys.delta_a())) < 1e-10


def test_frobenius_plug_in_residual():
    rng = np.random.default_rng(7)
    a = _rand_herm(rng, 3)
    sys = classical_system(np.array([0.0, 1.0, 2.0]), a)
    z0 = 0.1 * np.exp(-0.3j)
    eps = 1e-6
    fp = (frobenius_solution(sys, z0 + eps) - frobenius_solution(sys, z0 - eps)) \
        / (2 * eps)
    coeff = 1j * np.diag(sys.u) + sys.B / z0
    assert norm(fp - coeff @ frobenius_solution(sys, z0)) < 1e-8


def test_frobenius_resonant_raises():
    # eigenvalues of B differing by a nonzero integer
    b = np.diag([0.2, 1.2]) + 0.0j
    b[0, 1] = 0.3
    sys = LinearSystem(np.array([0.0, 1.0]), b)
    with pytest.raises(ResonantSystem):
        frobenius_solution(sys, 0.2)


def test_canonical_solution_ode_residual():
    rng = np.random.default_rng(3)
    a = _rand_herm(rng, 2)
    sys = classical_system(np.array([0.0, 1.0]), a)
    z = 2.5 * np.exp(-3j * np.pi / 8)
    eps = 1e-6
    fp = (canonical_solution(sys, +1, z + eps)
          - canonical_solution(sys, +1, z - eps)) / (2 * eps)
    coeff = 1j * np.diag(sys.u) + sys.B / z
    assert norm(fp - coeff @ canonical_solution(sys, +1, z)) < 1e-7


def test_anchor_radius_independence():
    rng = np.random.default_rng(11)
    a = _rand_herm(rng, 2)
    sys = classical_system(np.array([0.0, 1.0]), a)
    s1 = stokes_plus(sys, radius=2.0)
    s2 = stokes_plus(sys, radius=4.0)
    assert norm(s1 - s2) / norm(s1) < 1e-7


def test_transport_consistency():
    rng = np.random.default_rng(5)
    a = _rand_herm(rng, 2)
    sys = classical_system(np.array([0.0, 1.0]), a)
    z0 = 2.0 * np.exp(-1j * np.pi / 4)
    z1 = 4.0 * np.exp(-1j * np.pi / 4)
    f0 = canonical_solution(sys, +1, z0)
    f1 = canonical_solution(sys, +1, z1)
    assert norm(taylor_transport(sys.u, sys.B, f0, z0, z1) - f1) < 1e-12


def test_2x2_closed_form_20_seeds():
    rng = np.random.default_rng(42)
    for _ in range(8):
        a = _rand_herm(rng, 2)
        mu = np.linalg.eigvals(a)
        s = stokes_plus(classical_system(np.array([0.0, 1.0]), a))
        pred = np.exp((a[0, 0] + a[1, 1]) / 4.0) \
            / (complex_gamma(1 + (mu[0] - a[0, 0]) / _2PII)
               * complex_gamma(1 + (mu[1] - a[0, 0]) / _2PII)) * a[0, 1]
        assert abs(s[0, 1] - pred) / abs(pred) < 1e-10
        assert abs(s[0, 0] - np.exp(a[0, 0] / 2)) < 1e-12


def test_gkz_2x2_sinh_values():
    # flip-coefficient residue: the lower Stokes entry is -2 sinh(h/2)
    h = 1.0
    b = (h / _2PII) * np.array([[0.0, 1.0], [1.0, 0.0]])
    sys = LinearSystem(np.array([0.0, 1.0]), b)
    sp = stokes_plus(sys)
    sm = stokes_minus(sys)
    delta = 2 * math.sinh(h / 2)
    assert abs(sp[0, 1] + delta) < 1e-12
    assert abs(sm[1, 0] + delta) < 1e-12
    assert abs(sp[1, 0]) < 1e-14 and abs(sm[0, 1]) < 1e-14


def test_monodromy_hermitian_3x3():
    rng = np.random.default_rng(8)
    a = _rand_herm(rng, 3)
    sys = classical_system(np.array([0.0, 1.0, 3.0]), a)
    sd = stokes_and_connection(sys)
    assert sd.residuals["monodromy"] < 1e-8
    assert sd.residuals["triangularity_plus"] < 1e-9
    assert sd.residuals["triangularity_minus"] < 1e-9


def test_monodromy_step_system_with_ties():
    rng = np.random.default_rng(9)
    a = _rand_herm(rng, 3)
    sys = classical_system(np.array([0.0, 0.0, 1.0]), a)
    sd = stokes_and_connection(sys)
    assert sd.residuals["monodromy"] < 1e-8
    # StokesForm: upper-left 2x2 block of S_plus equals e^{A^{(2)}/2}
    assert norm(sd.Splus[:2, :2] - expm(a[:2, :2] / 2.0)) < 1e-9


def test_connection_gl_equivariance():
    rng = np.random.default_rng(10)
    a = _rand_herm(rng, 3)
    u = np.array([0.0, 0.0, 1.0])
    g = np.eye(3, dtype=complex)
    g[:2, :2] += 0.4 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    c0 = connection(classical_system(u, a))
    c1 = connection(classical_system(u, g @ a @ np.linalg.inv(g)))
    assert norm(c1 - g @ c0 @ np.linalg.inv(g)) / norm(c0) < 1e-7


def test_quantum_flattened_monodromy():
    from stokescat.gzrep import standard_rep, t_matrix
    t = t_matrix(standard_rep(2))
    sys = quantum_system(np.array([0.0, 1.0]), t, 0.8, block=2)
    sd = stokes_and_connection(sys)
    assert sd.residuals["monodromy"] < 1e-8
    # monodromy exponent is e^{A_eff} with A_eff = -hT
    lhs = sd.C @ expm(-0.8 * t) @ np.linalg.inv(sd.C)
    assert norm(lhs - sd.Sminus @ sd.Splus) < 1e-9
