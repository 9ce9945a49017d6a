import numpy as np
import pytest

from stokescat.caterpillar import (assemble_caterpillar, corollary_entry,
                                   ctilde_chain, lemma_b_column, spectral_tower,
                                   step_connection, step_stokes_column)
from stokescat.errors import NotInGL0
from stokescat.linalg import expm, norm
from stokescat.oracle import classical_system, connection, stokes_plus


def _rand_herm(rng, n, scale=0.7):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2.0


def test_tower_diagonal_matrix():
    tw = spectral_tower(np.diag([0.3, 1.1, 2.2]))
    for k in range(1, 3):
        assert norm(tw.a[k]) < 1e-14
        assert norm(tw.P[k] - np.eye(3)) < 1e-12


def test_tower_2x2_swap():
    tw = spectral_tower(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert abs(tw.lam[1][0]) < 1e-14
    assert np.allclose(sorted(tw.lam[2].real), [-1, 1])
    assert abs(tw.a[1][0] - 1.0) < 1e-14


def test_tower_stage_form_and_identities():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = 0.5 * a
    tw = spectral_tower(a)
    for k in range(1, 5):
        stage = tw.stage[k]
        # upper-left k block diagonal with lam^k
        assert norm(stage[:k, :k] - np.diag(tw.lam[k])) < 1e-9
    assert tw.diagnostics["ab_product_identity"] < 1e-9
    assert tw.diagnostics["chain_recursion"] < 1e-9
    assert tw.diagnostics["l_vs_chain"] < 1e-9


def test_gl0_rejects_integer_gap():
    a = np.diag([0.25, 1.25])  # eigenvalue gap exactly 1
    a = a + 1e-13 * np.array([[0, 1], [1, 0]])
    with pytest.raises(NotInGL0):
        spectral_tower(a)


def test_step_zero_coupling_column():
    tw = spectral_tower(np.diag([0.3, 1.7, 2.9]))
    for k in (1, 2):
        assert norm(step_stokes_column(tw, k)) < 1e-13


def test_step_column_vs_oracle_rank2_and_rank3():
    rng = np.random.default_rng(4)
    a = _rand_herm(rng, 3)
    tw = spectral_tower(a)
    for k, tol in ((1, 1e-6), (2, 1e-5)):
        stage = tw.stage[k][:k + 1, :k + 1]
        u = np.zeros(k + 1)
        u[-1] = 1.0
        oracle = stokes_plus(classical_system(u, stage))
        bc = step_stokes_column(tw, k)
        assert norm(oracle[:k, k] - bc) / norm(bc) < tol


def test_step_connection_vs_oracle():
    rng = np.random.default_rng(5)
    a = _rand_herm(rng, 3)
    tw = spectral_tower(a)
    for k in (1, 2):
        stage = tw.stage[k][:k + 1, :k + 1]
        u = np.zeros(k + 1)
        u[-1] = 1.0
        lt = (tw.P[k] @ np.linalg.inv(tw.P[k + 1]))[:k + 1, :k + 1]
        ct = step_connection(tw, k)
        assert norm(ct - connection(classical_system(u, stage)) @ lt) \
            / norm(ct) < 1e-6


def test_step_connection_rank1_trivial():
    tw = spectral_tower(_rand_herm(np.random.default_rng(6), 2))
    chain = ctilde_chain(tw)
    assert norm(chain[0] - np.eye(2)) < 1e-14


def test_assemble_diagonal():
    a = np.diag([0.2, 1.3])
    cs = assemble_caterpillar(spectral_tower(a))
    assert norm(cs.Splus - expm(a / 2)) < 1e-12
    assert norm(cs.Sminus - expm(a / 2)) < 1e-12


def test_assemble_rank2_matches_oracle():
    rng = np.random.default_rng(7)
    a = _rand_herm(rng, 2)
    cs = assemble_caterpillar(spectral_tower(a))
    from stokescat.oracle import stokes_and_connection
    sd = stokes_and_connection(classical_system(np.array([0.0, 1.0]), a))
    assert norm(cs.Splus - sd.Splus) < 1e-8
    assert norm(cs.Sminus - sd.Sminus) < 1e-8


def test_assemble_monodromy_and_bcolumns():
    rng = np.random.default_rng(8)
    a = _rand_herm(rng, 3)
    tw = spectral_tower(a)
    cs = assemble_caterpillar(tw)
    assert cs.diagnostics["monodromy"] < 1e-8
    assert cs.diagnostics["gauss_diag_vs_exp_diag"] < 1e-9
    for k in (1, 2):
        assert norm(lemma_b_column(tw, k) - cs.Splus[:k, k]) < 1e-8
        assert abs(corollary_entry(tw, k) - cs.Splus[k - 1, k]) < 1e-8


def test_nesting_and_labeling_and_hermitian():
    rng = np.random.default_rng(9)
    a = _rand_herm(rng, 4)
    tw = spectral_tower(a)
    cs = assemble_caterpillar(tw)
    sub = assemble_caterpillar(spectral_tower(a[:3, :3]))
    assert norm(cs.Splus[:3, :3] - sub.Splus) < 1e-9
    twp = spectral_tower(a, label_permutations={2: [1, 0], 3: [2, 0, 1]})
    csp = assemble_caterpillar(twp)
    assert norm(cs.Splus - csp.Splus) < 1e-9
    assert norm(cs.Sminus - cs.Splus.conj().T) < 1e-8


def test_tower_a_from_P_rows():
    rng = np.random.default_rng(10)
    a = _rand_herm(rng, 3)
    tw = spectral_tower(a)
    for k in (1, 2):
        want = tw.P[k][:k, :k] @ a[:k, k]
        assert norm(tw.a[k] - want) < 1e-10
