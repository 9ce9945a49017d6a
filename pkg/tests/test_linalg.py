import numpy as np
import pytest

from stokescat.errors import (IndexOutOfBounds, NearDegenerateSpectrum,
                              NonCommutingFamily, SingularPivot)
from stokescat.linalg import (OperatorMatrix, ToleranceConfig, eig_diagonalizable,
                              expm, fiberwise_apply, gauss_ldu,
                              joint_diagonalize, minor, norm)


def test_eig_diagonal_input():
    lam, v, left = eig_diagonalizable(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(lam, [1, 2, 3])
    assert np.allclose(v, np.eye(3))


def test_eig_symmetric_swap():
    lam, v, left = eig_diagonalizable(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(lam, [-1.0, 1.0])
    assert abs(abs(np.vdot(v[:, 0], v[:, 1]))) < 1e-12


def test_eig_residual_random():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    lam, v, left = eig_diagonalizable(a)
    assert norm(a @ v - v @ np.diag(lam)) < 1e-10
    assert norm(left @ a - np.diag(lam) @ left) < 1e-10
    assert norm(left @ v - np.eye(4)) < 1e-12


def test_eig_degenerate_raises():
    with pytest.raises(NearDegenerateSpectrum):
        eig_diagonalizable(np.diag([1.0, 1.0 + 1e-12]))


def test_minor_basics():
    a = np.array([["a", "b"], ["c", "d"]], dtype=object)
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert minor(a, [0], [1]) == 2.0
    # adjugate of [[a,b],[c,d]] via signed minors
    adj = np.array([[minor(a, [1], [1]), -minor(a, [0], [1])],
                    [-minor(a, [1], [0]), minor(a, [0], [0])]])
    assert np.allclose(adj, [[4, -2], [-3, 1]])


def test_minor_laplace_expansion():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    det = sum((-1) ** j * a[0, j] * minor(a, [1, 2],
                                          [c for c in range(3) if c != j])
              for j in range(3))
    assert abs(det - np.linalg.det(a)) < 1e-12


def test_minor_bad_indices():
    a = np.eye(2)
    with pytest.raises(IndexOutOfBounds):
        minor(a, [0, 1], [0])
    with pytest.raises(IndexOutOfBounds):
        minor(a, [1, 0], [0, 1])


def test_gauss_identity_and_roundtrip():
    lmat, dmat, umat = gauss_ldu(np.eye(3))
    assert np.allclose(lmat @ dmat @ umat, np.eye(3))
    x, y, p, q = 0.7, -0.3, 2.0, 0.5
    m = np.array([[1, 0], [x, 1]]) @ np.diag([p, q]) @ np.array([[1, y], [0, 1]])
    lmat, dmat, umat = gauss_ldu(m)
    assert np.allclose(lmat, [[1, 0], [x, 1]])
    assert np.allclose(umat, [[1, y], [0, 1]])
    assert np.allclose(np.diag(dmat), [p, q])


def test_gauss_operator_blocks():
    rng = np.random.default_rng(2)
    base = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = lambda c0, c1: c0 * np.eye(2) + c1 * base     # commuting family
    blocks = [[f(1.0, 0.2), f(0.0, 0.4)], [f(0.3, -0.1), f(2.0, 0.1)]]
    m = OperatorMatrix.from_blocks(blocks)
    lmat, dmat, umat = gauss_ldu(m.flat, block=2)
    assert norm(lmat @ dmat @ umat - m.flat) < 1e-10


def test_gauss_singular_pivot():
    with pytest.raises(SingularPivot) as exc:
        gauss_ldu(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert exc.value.block_index == 1


def test_joint_diagonalize_diagonal_family():
    basis, table = joint_diagonalize([np.diag([1.0, 2.0]), np.diag([3.0, 5.0])])
    order = np.argsort(table[:, 0].real)
    assert np.allclose(table[order], [[1, 3], [2, 5]])


def test_joint_diagonalize_sigma_x():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    basis, table = joint_diagonalize([sx, np.eye(2)])
    assert sorted(np.round(table[:, 0].real)) == [-1, 1]
    assert np.allclose(table[:, 1], 1.0)


def test_joint_diagonalize_polynomials_of_matrix():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    fam = [a @ a + a, 2 * a - a @ a @ a]
    basis, table = joint_diagonalize(fam)
    for m, f in enumerate(fam):
        assert norm(f @ basis - basis @ np.diag(table[:, m])) < 1e-9


def test_joint_diagonalize_noncommuting_raises():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.diag([1.0, -1.0])
    with pytest.raises(NonCommutingFamily):
        joint_diagonalize([sx, sz])


def test_fiberwise_apply():
    x = np.diag([0.0, np.log(2.0)])
    out = fiberwise_apply(np.exp, x, np.eye(2))
    assert np.allclose(out, np.diag([1.0, 2.0]))
    # identity function returns x itself
    out = fiberwise_apply(lambda z: z, x, np.eye(2))
    assert np.allclose(out, x)


def test_fiberwise_composition():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(3, 3))
    a = a + a.T
    basis = np.linalg.eigh(a)[1].astype(complex)
    f = np.exp
    g = lambda z: z ** 2
    via_comp = fiberwise_apply(lambda z: f(g(z)), a.astype(complex), basis)
    inner = fiberwise_apply(g, a.astype(complex), basis)
    via_two = fiberwise_apply(f, inner, basis)
    assert norm(via_comp - via_two) < 1e-9


def test_expm_vs_eig():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lam, v = np.linalg.eig(a)
    ref = v @ np.diag(np.exp(lam)) @ np.linalg.inv(v)
    assert norm(expm(a) - ref) < 1e-11


def test_tolerance_config_positive():
    with pytest.raises(ValueError):
        ToleranceConfig(eig_tol=0.0)
