import math

import numpy as np
import pytest

from stokescat.gzrep import (build_rep, capelli_spectrum, standard_rep,
                             t_matrix, tensor_rep, trivial_rep)
from stokescat.linalg import expm, norm
from stokescat.oracle import quantum_system, stokes_and_connection
from stokescat.qcat import (appel_gautam, assemble_quantum,
                            assemble_quantum_generators, entry_formula_thm,
                            fiber_data, hypergeometric_residual,
                            step_brow_ops, step_bcol_ops, step_stokes_pair,
                            superdiag_entry, _gz, _norm_blocks)


def _flat_gz(rep, sp):
    n, d = rep.n, rep.d
    t = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            t[i * d:(i + 1) * d, j * d:(j + 1) * d] = _gz(sp, rep.gen(j, i))
    return t


@pytest.mark.parametrize("spec,h", [("standard(2)", 1.0), ("standard(2)", 0.5),
                                    ("tensor(standard(2),standard(2))", 0.8),
                                    ("sym_power(standard(2),2)", 0.5)])
def test_step_pair_vs_oracle(spec, h):
    rep = build_rep(spec)
    sp = capelli_spectrum(rep, h)
    fd = fiber_data(rep, sp, h)
    tgz = _flat_gz(rep, sp)
    sd = stokes_and_connection(quantum_system(np.array([0.0, 1.0]), tgz, h,
                                              block=rep.d))
    sm, s_plus = step_stokes_pair(fd, 1)
    assert norm(s_plus - sd.Splus) < 1e-10
    assert norm(sm - sd.Sminus) < 1e-10


def test_trivial_rep_assembly_is_identity_scale():
    rep = trivial_rep(2)
    sp = capelli_spectrum(rep, 1.0)
    fd = fiber_data(rep, sp, 1.0)
    assert norm(step_bcol_ops(fd, 1)[0]) == 0.0
    qs = assemble_quantum(fd)
    assert norm(qs.Splus - np.eye(2)) < 1e-12
    assert norm(qs.Sminus - np.eye(2)) < 1e-12


def test_assembled_n2_upper_entry_is_step_column():
    rep = standard_rep(2)
    h = 1.0
    sp = capelli_spectrum(rep, h)
    fd = fiber_data(rep, sp, h)
    qs = assemble_quantum(fd)
    d = rep.d
    dgi = np.linalg.inv(_norm_blocks(fd, -1.0) @ _norm_blocks(fd, -1.0))
    want = dgi[0:d, 0:d] @ step_bcol_ops(fd, 1)[0]
    assert norm(qs.Splus[0:d, d:2 * d] - want) < 1e-12
    # gl(2) standard: the single off entry is -2 sinh(h/2) against e^{h E11}
    val = qs.Splus[0:2, 2:4]
    assert abs(val[1, 0] + 2 * math.sinh(h / 2) * math.exp(h)) < 1e-10


def test_quantum_monodromy_diag_normalization():
    for spec in ("standard(2)", "tensor(standard(2),standard(2))"):
        rep = build_rep(spec)
        for h in (1.0, 0.5):
            sp = capelli_spectrum(rep, h)
            fd = fiber_data(rep, sp, h)
            qs = assemble_quantum(fd)
            assert qs.diagnostics["gauss_diag_vs_norm"] < 1e-8
            assert qs.diagnostics["monodromy"] < 1e-8
            # spec-normalized diagonals: e^{+h rho(E_jj)/2}
            d = rep.d
            for j in range(rep.n):
                blk = qs.Splus[j * d:(j + 1) * d, j * d:(j + 1) * d]
                want = expm(0.5 * h * _gz(sp, rep.gen(j, j)))
                assert norm(blk - want) < 1e-10


def test_generators_assembly_completion_residuals():
    rep = standard_rep(3)
    for h in (1.0, 0.5):
        sp = capelli_spectrum(rep, h)
        fd = fiber_data(rep, sp, h)
        qs = assemble_quantum_generators(fd)
        assert qs.diagnostics["completion_plus"] < 1e-10
        assert qs.diagnostics["completion_mixed"] < 1e-10


def test_nesting_upper_block():
    rep = standard_rep(3)
    h = 0.5
    sp = capelli_spectrum(rep, h)
    fd = fiber_data(rep, sp, h)
    qs = assemble_quantum(fd)
    d = rep.d
    sm2, sp2 = step_stokes_pair(fd, 1)
    dgi = np.linalg.inv(_norm_blocks(fd, -1.0) @ _norm_blocks(fd, -1.0))
    want_plus = (dgi @ np.vstack([np.hstack([sp2, np.zeros((2 * d, d))]),
                                  np.zeros((d, 3 * d))]))[:2 * d, :2 * d]
    assert norm(qs.Splus[:2 * d, :2 * d] - want_plus) < 1e-9


def test_entry_formula_two_paths():
    for spec in ("standard(2)", "standard(3)"):
        rep = build_rep(spec)
        for h in (1.0, 0.5):
            sp = capelli_spectrum(rep, h)
            fd = fiber_data(rep, sp, h)
            qs = assemble_quantum(fd)
            d = rep.d
            dgi = np.linalg.inv(_norm_blocks(fd, -1.0)
                                @ _norm_blocks(fd, -1.0))
            for k in range(1, rep.n):
                ent = qs.Splus[(k - 1) * d:k * d, k * d:(k + 1) * d]
                cand = dgi[(k - 1) * d:k * d, (k - 1) * d:k * d] \
                    @ entry_formula_thm(fd, k)
                assert norm(cand - ent) < 1e-7


def test_trivial_entry_formula_zero():
    rep = trivial_rep(3)
    sp = capelli_spectrum(rep, 1.0)
    fd = fiber_data(rep, sp, 1.0)
    assert norm(entry_formula_thm(fd, 1)) < 1e-14
    assert norm(entry_formula_thm(fd, 2)) < 1e-14


def test_hypergeometric_plug_in():
    for spec in ("standard(2)", "tensor(standard(2),standard(2))",
                 "standard(3)"):
        rep = build_rep(spec)
        for h in (1.0, 0.5):
            sp = capelli_spectrum(rep, h)
            fd = fiber_data(rep, sp, h)
            res = hypergeometric_residual(
                fd, 1, [1.3, -2 + 0.5j, 0.7 - 0.3j, 2.1 + 1j, -0.9 - 0.8j])
            assert max(res.values()) < 1e-8


def test_appel_gautam_images_and_gauge():
    rep = standard_rep(2)
    h = 1.0
    sp = capelli_spectrum(rep, h)
    fd = fiber_data(rep, sp, h)
    qs = assemble_quantum(fd)
    ag = appel_gautam(fd, qs)
    # [e, f] = (K - K^{-1})/(q - q^{-1}) directly
    q = math.exp(h / 2)
    k1 = ag.cartan[1] @ np.linalg.inv(ag.cartan[2])
    cart = (k1 - np.linalg.inv(k1)) / (q - 1 / q)
    comm = ag.psi_e[1] @ ag.psi_f[1] - ag.psi_f[1] @ ag.psi_e[1]
    assert norm(comm - cart) < 1e-10
    # hyperbolic-gauge ratios are unimodular on the support
    g = ag.gauge_e[1]
    mask = np.abs(ag.psi_e[1]) > 1e-10
    assert np.max(np.abs(np.abs(g[mask]) - 1.0)) < 1e-10


def test_trivial_ag_images_zero():
    rep = trivial_rep(2)
    sp = capelli_spectrum(rep, 1.0)
    fd = fiber_data(rep, sp, 1.0)
    qs = assemble_quantum(fd)
    ag = appel_gautam(fd, qs)
    assert norm(ag.psi_e[1]) < 1e-13
    assert norm(ag.psi_f[1]) < 1e-13
