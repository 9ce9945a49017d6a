"""R-matrix, RLL/Yang-Baxter residuals, and Drinfeld-Jimbo relation checks.

Tensor conventions: lexicographic basis v_i (x) v_j on C^n (x) C^n; for the
triple checks the third slot carries the representation space, so all
products are evaluated as flattened (n*n*d) matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch
from .linalg import expm, norm
from .oracle import LinearSystem, quantum_system, stokes_minus, stokes_plus


def _e(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def r_matrix(n: int, h: float) -> np.ndarray:
    """Standard gl(n) R-matrix on C^n (x) C^n, lexicographic basis.

    R = sum_{i != j} E_ii x E_jj + e^{h/2} sum_i E_ii x E_ii
        + (e^{h/2} - e^{-h/2}) sum_{j < i} E_ij x E_ji.
    """
    if n < 2:
        raise ShapeMismatch("r_matrix needs n >= 2")
    r = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i != j:
                r += np.kron(_e(n, i, i), _e(n, j, j))
    r += math.exp(h / 2.0) * in_sum(n)
    delta = math.exp(h / 2.0) - math.exp(-h / 2.0)
    for i in range(n):
        for j in range(n):
            if j < i:
                r += delta * np.kron(_e(n, i, j), _e(n, j, i))
    return r


def in_sum(n):
    out = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        out += np.kron(_e(n, i, i), _e(n, i, i))
    return out


def casimir_flip(n: int) -> np.ndarray:
    """Omega = sum E_ij x E_ji, the flip operator on C^n (x) C^n."""
    out = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            out += np.kron(_e(n, i, j), _e(n, j, i))
    return out


def ybe_residual(r: np.ndarray, n: int) -> float:
    """|| R12 R13 R23 - R23 R13 R12 || on C^n x C^n x C^n."""
    eye = np.eye(n)
    r12 = np.kron(r, eye)
    r23 = np.kron(eye, r)
    r13 = _embed13(r, n)
    return norm(r12 @ r13 @ r23 - r23 @ r13 @ r12)


def _embed13(r: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n ** 3, n ** 3), dtype=complex)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for ap in range(n):
                    for cp in range(n):
                        out[(a * n + b) * n + c, (ap * n + b) * n + cp] = \
                            r[a * n + c, ap * n + cp]
    return out


def gkz_oracle(n: int, h: float, u_values, tol=None):
    """Stokes matrix of the flip-coefficient system, as the R-matrix witness.

    Integrates dF/dz = (iu + (h/2 pi i) Omega / z) F on C^n (x) C^n for the
    given diagonal u (acting on the first factor) and returns the inverse of
    the lower Stokes factor; repeated over all supplied u tuples, it also
    reports the maximal pairwise difference.
    """
    om = casimir_flip(n)
    results = []
    for u in u_values:
        sys = quantum_system(np.asarray(u, dtype=float), om, h, block=n)
        results.append(np.linalg.inv(stokes_minus(sys)))
    spread = 0.0
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            spread = max(spread, norm(results[i] - results[j]))
    return results[0], spread


# -- operator-valued tensor embeddings ---------------------------------------

def embed_s(s_flat: np.ndarray, n: int, d: int, slot: int) -> np.ndarray:
    """Embed an n x n operator matrix into End(C^n x C^n) (x) End(W).

    slot=1: matrix indices on the first tensor factor (S^{13});
    slot=2: on the second factor (S^{23}).  Operators always act on W.
    """
    if s_flat.shape != (n * d, n * d):
        raise ShapeMismatch("flattened operator matrix has wrong shape")
    big = np.zeros((n * n * d, n * n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            blk = s_flat[i * d:(i + 1) * d, j * d:(j + 1) * d]
            for m in range(n):
                if slot == 1:
                    big[(i * n + m) * d:(i * n + m + 1) * d,
                        (j * n + m) * d:(j * n + m + 1) * d] = blk
                else:
                    big[(m * n + i) * d:(m * n + i + 1) * d,
                        (m * n + j) * d:(m * n + j + 1) * d] = blk
    return big


def embed_r12(r: np.ndarray, n: int, d: int) -> np.ndarray:
    return np.kron(r, np.eye(d))


@dataclass
class ResidualReport:
    residuals: dict = field(default_factory=dict)
    tol: float = 1e-7

    def passed(self) -> bool:
        return all(v < self.tol for v in self.residuals.values())

    def rows(self):
        return [(k, v, "PASS" if v < self.tol else "FAIL")
                for k, v in self.residuals.items()]


def rll_residuals(r: np.ndarray, s_plus: np.ndarray, s_minus: np.ndarray,
                  n: int, d: int, tol: float = 1e-7) -> ResidualReport:
    """Residual norms of the three exchange relations.

    L_+ := s_plus and L_- := s_minus^{-1}, both normalized so that their
    diagonals are e^{+h rho(E_jj)/2} and e^{-h rho(E_jj)/2} respectively
    (so l+_ii l-_ii = 1).  With the lexicographic flattening the matrix slot
    listed first in the relations corresponds to our SECOND tensor factor,
    so the relations read R12 A23 B13 = B13 A23 R12.
    """
    lp = s_plus
    lm = np.linalg.inv(s_minus)
    r12 = embed_r12(r, n, d)
    rep = ResidualReport(tol=tol)
    scale = max(norm(lp), norm(lm), 1.0) ** 2 * max(norm(r), 1.0)
    for name, a, b in (("plus_plus", lp, lp), ("minus_minus", lm, lm),
                       ("plus_minus", lp, lm)):
        a23 = embed_s(a, n, d, 2)
        b13 = embed_s(b, n, d, 1)
        rep.residuals[name] = norm(r12 @ a23 @ b13 - b13 @ a23 @ r12) / scale
    return rep


def dj_relation_check(psi_e, psi_f, cartan, h: float, n: int,
                      tol: float = 1e-7) -> ResidualReport:
    """Drinfeld-Jimbo relation residuals on candidate generator images.

    psi_e/psi_f: dict k -> d x d image of e_k / f_k (k = 1..n-1, 1-based);
    cartan: dict i -> image of q^{h_i} (k = 1..n, invertible).
    Checks [e_i, f_j] = delta_ij (K_i - K_i^{-1})/(q - q^{-1}) with
    K_i := q^{h_i - h_{i+1}}, the q-Serre relations for |i-j| = 1, and
    commutation for |i-j| >= 2.
    """
    q = math.exp(h / 2.0)
    rep = ResidualReport(tol=tol)
    scale = max(max((norm(v) for v in psi_e.values()), default=1.0),
                max((norm(v) for v in psi_f.values()), default=1.0), 1.0)
    for i in psi_e:
        for j in psi_f:
            comm = psi_e[i] @ psi_f[j] - psi_f[j] @ psi_e[i]
            if i == j:
                ki = cartan[i] @ np.linalg.inv(cartan[i + 1])
                rhs = (ki - np.linalg.inv(ki)) / (q - 1.0 / q)
            else:
                rhs = np.zeros_like(comm)
            rep.residuals[f"ef_{i}{j}"] = norm(comm - rhs) / scale ** 2
    for gens, tag in ((psi_e, "e"), (psi_f, "f")):
        for i in gens:
            for j in gens:
                if abs(i - j) == 1:
                    x, y = gens[i], gens[j]
                    serre = x @ x @ y - (q + 1.0 / q) * x @ y @ x + y @ x @ x
                    rep.residuals[f"serre_{tag}_{i}{j}"] = norm(serre) / scale ** 3
                elif i < j and abs(i - j) >= 2:
                    rep.residuals[f"comm_{tag}_{i}{j}"] = norm(
                        gens[i] @ gens[j] - gens[j] @ gens[i]) / scale ** 2
    return rep
