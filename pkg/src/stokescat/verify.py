"""Reproducible verification suite: one callable per invariant group.

Each check returns a list of (name, residual, tolerance) rows; `all_checks`
wires them with deterministic per-check seeds so that `verify-all` output is
bit-stable for a fixed seed.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import expm, norm

_2PII = 2j * math.pi


def _rand_herm(rng, n, scale=0.7):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2.0


def check_special(seed=0):
    from .special import branch_log, complex_gamma, hyper_kFk, HyperParams
    rng = np.random.default_rng(seed)
    rows = []
    worst_ref = worst_rec = 0.0
    for _ in range(25):
        z = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        if min(abs(z - round(z.real)), abs(z.real - round(z.real))) < 0.2:
            continue
        target = math.pi / np.sin(math.pi * z)
        worst_ref = max(worst_ref, abs(complex_gamma(z) * complex_gamma(1 - z)
                                       - target) / abs(target))
        worst_rec = max(worst_rec, abs(complex_gamma(z + 1) - z * complex_gamma(z))
                        / abs(complex_gamma(z + 1)))
    rows.append(("gamma_reflection", worst_ref, 1e-10))
    rows.append(("gamma_recurrence", worst_rec, 1e-11))
    rows.append(("branch_log_minus_one",
                 abs(branch_log(-1) + 1j * math.pi), 1e-14))
    p = HyperParams([1.2], [1.2], 0.5 + 0.3j)
    rows.append(("kfk_exp", abs(hyper_kFk(p) - np.exp(0.5 + 0.3j)), 1e-12))
    return rows


def check_oracle(seed=1):
    from .oracle import classical_system, stokes_and_connection, stokes_plus
    from .special import complex_gamma
    rng = np.random.default_rng(seed)
    rows = []
    worst_rel = 0.0
    for _ in range(4):
        a = _rand_herm(rng, 2)
        mu = np.linalg.eigvals(a)
        s = stokes_plus(classical_system(np.array([0.0, 1.0]), a))
        pred = np.exp((a[0, 0] + a[1, 1]) / 4.0) \
            / (complex_gamma(1 + (mu[0] - a[0, 0]) / _2PII)
               * complex_gamma(1 + (mu[1] - a[0, 0]) / _2PII)) * a[0, 1]
        worst_rel = max(worst_rel, abs(s[0, 1] - pred) / abs(pred))
    rows.append(("oracle_2x2_closed_form", worst_rel, 1e-8))
    a = _rand_herm(rng, 3)
    sd = stokes_and_connection(classical_system(np.array([0.0, 1.0, 3.0]), a))
    rows.append(("oracle_monodromy_3level", sd.residuals["monodromy"], 1e-8))
    rows.append(("oracle_triangularity",
                 sd.residuals["triangularity_plus"]
                 + sd.residuals["triangularity_minus"], 1e-9))
    s1 = stokes_plus(classical_system(np.array([0.0, 1.0, 3.0]), a))
    s2 = stokes_plus(classical_system(np.array([0.0, 1.0, 3.0]), a),
                     radius=2 * 2.0)
    rows.append(("oracle_anchor_doubling", norm(s1 - s2) / norm(s1), 1e-7))
    # GL(k-1) equivariance of the step connection
    from .oracle import connection
    a = _rand_herm(rng, 3)
    u = np.array([0.0, 0.0, 1.0])
    g3 = np.eye(3, dtype=complex)
    g3[:2, :2] = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) \
        + 2 * np.eye(2)
    c1 = connection(classical_system(u, g3 @ a @ np.linalg.inv(g3)))
    c0 = connection(classical_system(u, a))
    rows.append(("oracle_connection_equivariance",
                 norm(c1 - g3 @ c0 @ np.linalg.inv(g3)) / norm(c0), 1e-7))
    return rows


def check_caterpillar(seed=2):
    from .caterpillar import (assemble_caterpillar, corollary_entry,
                              lemma_b_column, spectral_tower)
    rng = np.random.default_rng(seed)
    rows = []
    worst = {"monodromy": 0.0, "lemma": 0.0, "corollary": 0.0,
             "nesting": 0.0, "labeling": 0.0, "hermitian": 0.0,
             "ab_product": 0.0, "chain": 0.0}
    for n in (2, 3, 4):
        a = _rand_herm(rng, n)
        tw = spectral_tower(a)
        cs = assemble_caterpillar(tw)
        worst["monodromy"] = max(worst["monodromy"], cs.diagnostics["monodromy"])
        worst["ab_product"] = max(worst["ab_product"],
                                  tw.diagnostics["ab_product_identity"])
        worst["chain"] = max(worst["chain"], tw.diagnostics["chain_recursion"])
        worst["hermitian"] = max(worst["hermitian"],
                                 norm(cs.Sminus - cs.Splus.conj().T))
        for k in range(1, n):
            worst["lemma"] = max(worst["lemma"], norm(
                lemma_b_column(tw, k) - cs.Splus[:k, k]))
            worst["corollary"] = max(worst["corollary"], abs(
                corollary_entry(tw, k) - cs.Splus[k - 1, k]))
        if n >= 3:
            sub = assemble_caterpillar(spectral_tower(a[:n - 1, :n - 1]))
            worst["nesting"] = max(worst["nesting"], norm(
                cs.Splus[:n - 1, :n - 1] - sub.Splus))
        perm = {2: [1, 0]}
        csp = assemble_caterpillar(spectral_tower(a, label_permutations=perm))
        worst["labeling"] = max(worst["labeling"], norm(cs.Splus - csp.Splus))
    return [("caterpillar_monodromy", worst["monodromy"], 1e-8),
            ("caterpillar_ab_product", worst["ab_product"], 1e-9),
            ("caterpillar_chain_recursion", worst["chain"], 1e-9),
            ("caterpillar_lemma_column", worst["lemma"], 1e-8),
            ("caterpillar_corollary_entry", worst["corollary"], 1e-8),
            ("caterpillar_nesting", worst["nesting"], 1e-9),
            ("caterpillar_labeling_invariance", worst["labeling"], 1e-9),
            ("caterpillar_hermitian_symmetry", worst["hermitian"], 1e-8)]


def check_steps_vs_oracle(seed=3):
    from .caterpillar import spectral_tower, step_connection, step_stokes_column
    from .oracle import classical_system, connection, stokes_plus
    rng = np.random.default_rng(seed)
    rows = []
    worst_b = worst_c = 0.0
    for _ in range(2):
        a = _rand_herm(rng, 3)
        tw = spectral_tower(a)
        for k in (1, 2):
            stage = tw.stage[k][:k + 1, :k + 1]
            u = np.zeros(k + 1)
            u[-1] = 1.0
            sys = classical_system(u, stage)
            bc = step_stokes_column(tw, k)
            worst_b = max(worst_b, norm(stokes_plus(sys)[:k, k] - bc) / norm(bc))
            lt = (tw.P[k] @ np.linalg.inv(tw.P[k + 1]))[:k + 1, :k + 1]
            ct = step_connection(tw, k)
            worst_c = max(worst_c, norm(ct - connection(sys) @ lt) / norm(ct))
    return [("step_column_vs_oracle", worst_b, 1e-6),
            ("step_connection_vs_oracle", worst_c, 1e-6)]


def check_gz(seed=4):
    from .gzrep import (build_rep, capelli_poly, capelli_spectrum,
                        quantum_diagonalize, quantum_minor,
                        verify_quantum_identities)
    from .qcat import fiber_data
    rows = []
    worst = {"bracket": 0.0, "comm": 0.0, "prod": 0.0, "shift": 0.0,
             "root": 0.0, "central": 0.0}
    for spec, h in (("standard(2)", 1.0), ("standard(3)", 0.7),
                    ("tensor(standard(2),standard(2))", 1.0),
                    ("sym_power(standard(2),2)", 0.5)):
        rep = build_rep(spec)
        worst["bracket"] = max(worst["bracket"], rep.bracket_residual())
        sp = capelli_spectrum(rep, h)
        fd = fiber_data(rep, sp, h)
        # root plug-in: each root annihilates the fiber polynomial
        for k in range(1, rep.n + 1):
            poly = sp.capelli[k]
            coeff = [np.diag(sp.basis_inv @ c @ sp.basis) for c in poly.coeffs]
            for p in range(rep.d):
                for root in sp.zeta[k][p]:
                    val = sum(coeff[m][p] * root ** m
                              for m in range(len(coeff)))
                    worst["root"] = max(worst["root"], abs(val))
        # centrality of Capelli coefficients
        for k in range(1, rep.n + 1):
            for c in sp.capelli[k].coeffs[:-1]:
                for ia in range(k):
                    for jb in range(k):
                        g = rep.gen(ia, jb)
                        worst["central"] = max(worst["central"],
                                               norm(c @ g - g @ c))
        # commutator / product / shift identities on the P-free couplings
        h_ = h
        d = rep.d
        for k in range(1, rep.n):
            for j in range(k):
                aj = fd.a_op[k][j]
                for i in range(k):
                    zi = np.diag(fd.zeta[k][:, i])
                    want = (h_ if i == j else 0.0) * aj
                    worst["comm"] = max(worst["comm"],
                                        norm(aj @ zi - zi @ aj - want))
                lhs = (h_ * fd.a_op[k][j]) @ (h_ * fd.b_op[k][j])
                rhs = np.diag(np.array([
                    -np.prod([fd.zeta[k][p, j] - fd.zeta[k + 1][p, v] + h_ / 2
                              for v in range(k + 1)])
                    / np.prod([fd.zeta[k][p, j] - fd.zeta[k][p, v]
                               for v in range(k) if v != j])
                    for p in range(d)]))
                worst["prod"] = max(worst["prod"], norm(lhs - rhs))
                zj = np.diag(fd.zeta[k][:, j])
                worst["shift"] = max(worst["shift"], norm(
                    zj @ aj - aj @ (zj - h_ * np.eye(d))))
    return [("rep_bracket", worst["bracket"], 1e-9),
            ("capelli_root_plug_in", worst["root"], 1e-9),
            ("capelli_centrality", worst["central"], 1e-9),
            ("quantum_commutator", worst["comm"], 1e-9),
            ("quantum_ab_product", worst["prod"], 1e-9),
            ("quantum_shift_property", worst["shift"], 1e-9)]


def check_quantum(seed=5):
    from .gzrep import build_rep, capelli_spectrum
    from .qcat import (appel_gautam, assemble_quantum, entry_formula_thm,
                       fiber_data, hypergeometric_residual, _norm_blocks)
    from .rll import dj_relation_check, r_matrix, rll_residuals
    rows = []
    worst = {"rll": 0.0, "thm": 0.0, "dj": 0.0, "dj_phi": 0.0, "qsol": 0.0,
             "gauge": 0.0, "diag": 0.0}
    for spec in ("standard(2)", "tensor(standard(2),standard(2))",
                 "sym_power(standard(2),2)", "standard(3)"):
        rep = build_rep(spec)
        for h in (1.0, 0.5):
            sp = capelli_spectrum(rep, h)
            fd = fiber_data(rep, sp, h)
            qs = assemble_quantum(fd)
            rll = rll_residuals(r_matrix(rep.n, h), qs.Splus, qs.Sminus,
                                rep.n, rep.d)
            worst["rll"] = max(worst["rll"], max(rll.residuals.values()))
            worst["diag"] = max(worst["diag"],
                                max(qs.diagnostics.values()))
            d = rep.d
            dgi = np.linalg.inv(_norm_blocks(fd, -1.0) @ _norm_blocks(fd, -1.0))
            for k in range(1, rep.n):
                ent = qs.Splus[(k - 1) * d:k * d, k * d:(k + 1) * d]
                cand = dgi[(k - 1) * d:k * d, (k - 1) * d:k * d] \
                    @ entry_formula_thm(fd, k)
                worst["thm"] = max(worst["thm"], norm(cand - ent))
            ag = appel_gautam(fd, qs)
            dj = dj_relation_check(ag.psi_e, ag.psi_f, ag.cartan, h, rep.n)
            worst["dj"] = max(worst["dj"], max(dj.residuals.values()))
            djp = dj_relation_check(ag.phi_e, ag.phi_f, ag.cartan, h, rep.n)
            worst["dj_phi"] = max(worst["dj_phi"], max(djp.residuals.values()))
            for k in ag.gauge_e:
                g = np.abs(ag.gauge_e[k])
                g = g[np.abs(ag.psi_e[k]) > 1e-10]
                if g.size:
                    worst["gauge"] = max(worst["gauge"],
                                         float(np.max(np.abs(g - 1.0))))
            res = hypergeometric_residual(fd, 1, [1.3, -2 + 0.5j])
            worst["qsol"] = max(worst["qsol"], max(res.values()))
    return [("rll_relations", worst["rll"], 1e-7),
            ("quantum_assembly_diagnostics", worst["diag"], 1e-8),
            ("thm_entry_two_path", worst["thm"], 1e-7),
            ("dj_relations_psi", worst["dj"], 1e-7),
            ("dj_relations_phi", worst["dj_phi"], 1e-7),
            ("gauge_unimodularity", worst["gauge"], 1e-10),
            ("hypergeometric_plug_in", worst["qsol"], 1e-8)]


def check_rmatrix(seed=6):
    from .rll import gkz_oracle, r_matrix, ybe_residual
    rows = []
    worst_ybe = max(ybe_residual(r_matrix(n, 0.8), n) for n in (2, 3, 4))
    rows.append(("ybe", worst_ybe, 1e-12))
    h = 1.0
    r0, spread = gkz_oracle(2, h, [(0.0, 1.0), (0.0, 3.0), (-1.0, 2.0)])
    d = math.exp(h / 2) - math.exp(-h / 2)
    rexp = np.array([[math.exp(h / 2), 0, 0, 0], [0, 1, 0, 0],
                     [0, d, 1, 0], [0, 0, 0, math.exp(h / 2)]], dtype=complex)
    rows.append(("gkz_matches_r_matrix", norm(r0 - rexp), 1e-6))
    rows.append(("gkz_u_independence", spread, 1e-7))
    return rows


def check_isomonodromy(seed=7):
    from .isomon import (flow, hamiltonian_consistency, poly_times_schedule,
                         spectral_drift, stokes_drift)
    rng = np.random.default_rng(seed)
    a0 = _rand_herm(rng, 3, 0.6)
    sch = poly_times_schedule(3, list(np.linspace(1.2, 2.0, 5)))
    states = flow(a0, sch)
    drift = stokes_drift(states, sch)
    ham = max(hamiltonian_consistency(np.array([0.3, 1.1, 2.7]),
                                      _rand_herm(rng, 3), j)
              for j in range(3))
    return [("iso_spectral_drift", spectral_drift(states), 1e-8),
            ("iso_stokes_drift",
             max(drift["drift_plus"], drift["drift_minus"]), 1e-4),
            ("iso_hamiltonian_consistency", ham, 1e-6)]


def all_checks(seed=42):
    base = np.random.SeedSequence(seed).generate_state(8)
    return [lambda s=int(base[0]): check_special(s),
            lambda s=int(base[1]): check_oracle(s),
            lambda s=int(base[2]): check_caterpillar(s),
            lambda s=int(base[3]): check_steps_vs_oracle(s),
            lambda s=int(base[4]): check_gz(s),
            lambda s=int(base[5]): check_quantum(s),
            lambda s=int(base[6]): check_rmatrix(s),
            lambda s=int(base[7]): check_isomonodromy(s)]
