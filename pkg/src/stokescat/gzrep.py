"""Finite-dimensional gl(n) representations and their Gelfand-Zeitlin data.

Representations are built functorially from the standard one.  The commuting
family generated by the coefficients of the shifted principal quantum minors
is diagonalized numerically; its joint eigenbasis carries per-vector root
tables, and the staged quantum diagonalization of hT is expressed through
fiberwise evaluation of minor polynomials at those roots.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateJointSpectrum, DimensionOverflow, FiberwisePole,
                     RootCollision, ShapeMismatch)
from .linalg import DEFAULT_TOL, ToleranceConfig, joint_diagonalize, norm

_DIM_CAP = 64


@dataclass
class Representation:
    """Generators rho[i][j] = rho(E_ij) as d x d matrices (0-based dict)."""

    n: int
    d: int
    rho: dict
    name: str = ""

    def gen(self, i: int, j: int) -> np.ndarray:
        return self.rho[(i, j)]

    def bracket_residual(self) -> float:
        out = 0.0
        idx = range(self.n)
        for i, j, k, l in itertools.product(idx, repeat=4):
            lhs = self.gen(i, j) @ self.gen(k, l) - self.gen(k, l) @ self.gen(i, j)
            rhs = (1.0 if j == k else 0.0) * self.gen(i, l) \
                - (1.0 if l == i else 0.0) * self.gen(k, j)
            out = max(out, norm(lhs - rhs))
        return out


def standard_rep(n: int) -> Representation:
    rho = {}
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            rho[(i, j)] = e
    return Representation(n, n, rho, f"standard({n})")


def trivial_rep(n: int) -> Representation:
    z = np.zeros((1, 1), dtype=complex)
    return Representation(n, 1, {(i, j): z.copy() for i in range(n)
                                 for j in range(n)}, f"trivial({n})")


def dual_rep(rep: Representation) -> Representation:
    rho = {key: -m.T.copy() for key, m in rep.rho.items()}
    return Representation(rep.n, rep.d, rho, f"dual({rep.name})")


def tensor_rep(r1: Representation, r2: Representation) -> Representation:
    if r1.n != r2.n:
        raise ShapeMismatch("tensor factors must share the rank n")
    d = r1.d * r2.d
    if d > _DIM_CAP:
        raise DimensionOverflow(f"dimension {d} exceeds cap {_DIM_CAP}")
    i1 = np.eye(r1.d)
    i2 = np.eye(r2.d)
    rho = {key: np.kron(r1.rho[key], i2) + np.kron(i1, r2.rho[key])
           for key in r1.rho}
    return Representation(r1.n, d, rho, f"tensor({r1.name},{r2.name})")


def sym_power_rep(rep: Representation, m: int) -> Representation:
    """Symmetric power, realized inside the m-fold tensor power."""
    d = rep.d
    if d ** m > 4096:
        raise DimensionOverflow("tensor power too large to project")
    basis_cols = []
    for combo in itertools.combinations_with_replacement(range(d), m):
        v = np.zeros(d ** m, dtype=complex)
        for perm in set(itertools.permutations(combo)):
            idx = 0
            for p in perm:
                idx = idx * d + p
            v[idx] += 1.0
        basis_cols.append(v / np.linalg.norm(v))
    q = np.array(basis_cols).T
    if q.shape[1] > _DIM_CAP:
        raise DimensionOverflow(f"dimension {q.shape[1]} exceeds cap {_DIM_CAP}")
    eyes = [np.eye(d)] * m
    rho = {}
    for key, g in rep.rho.items():
        big = np.zeros((d ** m, d ** m), dtype=complex)
        for slot in range(m):
            mats = list(eyes)
            mats[slot] = g
            term = mats[0]
            for x in mats[1:]:
                term = np.kron(term, x)
            big += term
        rho[key] = q.conj().T @ big @ q
    return Representation(rep.n, q.shape[1], rho, f"sym_power({rep.name},{m})")


def build_rep(spec: str) -> Representation:
    """Parse specs like standard(2), dual(standard(3)), tensor(a,b),
    sym_power(standard(2),2), trivial(2)."""
    spec = spec.strip()
    head, _, rest = spec.partition("(")
    if not rest.endswith(")"):
        raise ShapeMismatch(f"malformed rep spec {spec!r}")
    inner = rest[:-1]
    if head == "standard":
        return standard_rep(int(inner))
    if head == "trivial":
        return trivial_rep(int(inner))
    if head == "dual":
        return dual_rep(build_rep(inner))
    if head in ("tensor", "sym_power"):
        depth = 0
        for pos, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                left, right = inner[:pos], inner[pos + 1:]
                break
        else:
            raise ShapeMismatch(f"malformed rep spec {spec!r}")
        if head == "tensor":
            return tensor_rep(build_rep(left), build_rep(right))
        return sym_power_rep(build_rep(left), int(right))
    raise ShapeMismatch(f"unknown rep spec {spec!r}")


def t_matrix(rep: Representation) -> np.ndarray:
    """Flattened n x n operator matrix with block (i, j) = rho(E_ji)."""
    n, d = rep.n, rep.d
    t = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            t[i * d:(i + 1) * d, j * d:(j + 1) * d] = rep.gen(j, i)
    return t


@dataclass
class QuantumMinorPoly:
    """Operator-coefficient polynomial sum_m coeffs[m] zeta^m."""

    coeffs: list
    rows: tuple
    cols: tuple
    shift: float

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def scalar_eval(self, z: complex, vec_weights=None) -> np.ndarray:
        out = np.zeros_like(self.coeffs[0])
        zp = 1.0 + 0.0j
        for c in self.coeffs:
            out = out + zp * c
            zp *= z
        return out


def _poly_mul(p, q):
    out = [np.zeros_like(p[0]) for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a @ b
    return out


def quantum_minor(rep: Representation, rows, cols, h: float,
                  shift: float = 0.0) -> QuantumMinorPoly:
    """Row-ordered minor of T(zeta) = zeta Id - h T with arguments
    zeta + shift + h(j-1) in the j-th factor.

    The ordered product over permutations is
    sum_sigma sgn(sigma) T_{r1, c_sigma(1)}(z_1) ... T_{rm, c_sigma(m)}(z_m).
    """
    rows = tuple(rows)
    cols = tuple(cols)
    m = len(rows)
    d = rep.d
    eye = np.eye(d, dtype=complex)
    zero = np.zeros((d, d), dtype=complex)
    total = [zero.copy() for _ in range(m + 1)]
    for perm in itertools.permutations(range(m)):
        sgn = 1.0
        for x in range(m):
            for y in range(x + 1, m):
                if perm[x] > perm[y]:
                    sgn = -sgn
        prod = [eye.copy()]
        for j in range(m):
            a, b = rows[j], cols[perm[j]]
            t_ab = rep.gen(b, a)          # T_{ab} = rho(E_ba)
            const = (shift + h * j) * (eye if a == b else zero) - h * t_ab
            lin = eye if a == b else zero
            prod = _poly_mul(prod, [const, lin])
        for deg in range(len(prod)):
            total[deg] = total[deg] + sgn * prod[deg]
    return QuantumMinorPoly(total, rows, cols, shift)


def capelli_poly(rep: Representation, k: int, h: float) -> QuantumMinorPoly:
    """M_k(zeta): the upper-left k x k minor at argument zeta - (h/2)(k-1)."""
    idx = tuple(range(k))
    return quantum_minor(rep, idx, idx, h, shift=-(h / 2.0) * (k - 1))


@dataclass
class GZSpectrum:
    """Joint eigenbasis with per-vector root tables of the Capelli family."""

    rep: Representation
    h: float
    basis: np.ndarray
    basis_inv: np.ndarray
    zeta: dict            # zeta[k]: (d, k) array, row p = roots on vector p
    zeta_next: dict = field(default_factory=dict)   # filled by the chain
    capelli: dict = field(default_factory=dict)

    def fiber_diag(self, values) -> np.ndarray:
        """Operator acting as values[p] on joint eigenvector p (GZ coords)."""
        return np.diag(np.asarray(values, dtype=complex))


def capelli_spectrum(rep: Representation, h: float,
                     tol: ToleranceConfig = DEFAULT_TOL) -> GZSpectrum:
    """Joint eigenbasis of the Capelli coefficients plus per-vector roots."""
    polys = {k: capelli_poly(rep, k, h) for k in range(1, rep.n + 1)}
    family = []
    for k, p in polys.items():
        family.extend(p.coeffs[:-1])      # leading coefficient is Id
    # pad with weight operators: they lie in the same commutative family and
    # help separate the joint spectrum
    for i in range(rep.n):
        family.append(h * rep.gen(i, i))
    if rep.d == 1:
        basis = np.eye(1, dtype=complex)
    else:
        basis, _ = joint_diagonalize(family, tol)
    basis_inv = np.linalg.inv(basis)
    zeta = {}
    for k in range(1, rep.n + 1):
        coeff_diag = [np.diag(basis_inv @ c @ basis) for c in polys[k].coeffs]
        roots = np.zeros((rep.d, k), dtype=complex)
        for p in range(rep.d):
            poly = [coeff_diag[deg][p] for deg in range(k + 1)]
            rts = np.roots(poly[::-1])
            rts = rts[np.lexsort((rts.imag.round(10), rts.real.round(10)))]
            for x in range(len(rts)):
                for y in range(x + 1, len(rts)):
                    if abs(rts[x] - rts[y]) < 1e-7:
                        raise RootCollision(
                            f"repeated level-{k} roots on joint vector {p}")
            roots[p] = rts
        zeta[k] = roots
    sp = GZSpectrum(rep=rep, h=h, basis=basis, basis_inv=basis_inv, zeta=zeta)
    sp.capelli = polys
    return sp


@dataclass
class QuantumChain:
    """Staged diagonalization data of hT, all in GZ coordinates.

    ``P[k]``, ``L[k]`` are flattened n x n operator matrices; ``a[k][j]`` and
    ``b[k][j]`` the coupling operators; ``Tk[k]`` = P^(k) hT P^(k)^{-1}.
    """

    spectrum: GZSpectrum
    P: dict
    L: dict
    a: dict
    b: dict
    Tk: dict
    zeta_next: dict
    diagnostics: dict = field(default_factory=dict)


def _embed_blocks(blocks, n, d):
    out = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = blocks[(i, j)]
    return out


def quantum_diagonalize(rep: Representation, sp: GZSpectrum,
                        h: float) -> QuantumChain:
    """Stage chain P^(k) built from fiberwise minor evaluations.

    P^(k)_{ij} = (-1)^{k-j} / prod_{l != i}(zeta_i - zeta_l)
                 * minor(rows 1..j^..k, cols 1..k-1)(zeta^k_i - (h/2)(k-3)),
    minor arguments substituted per joint eigenvector, powers of the root on
    the right of the coefficients.
    """
    n, d = rep.n, rep.d
    eye = np.eye(d, dtype=complex)
    zero = np.zeros((d, d), dtype=complex)
    gz = lambda m: sp.basis_inv @ m @ sp.basis    # to GZ coordinates

    def fiber_poly(poly: QuantumMinorPoly, vals) -> np.ndarray:
        # sum_m C_m diag(vals)^m in GZ coordinates (right powers = col scaling)
        out = np.zeros((d, d), dtype=complex)
        vp = np.ones(d, dtype=complex)
        for c in poly.coeffs:
            out = out + gz(c) * vp[None, :]
            vp = vp * np.asarray(vals, dtype=complex)
        return out

    ht = gz_t = _embed_blocks({(i, j): gz(h * rep.gen(j, i)) for i in range(n)
                               for j in range(n)}, n, d)

    P = {}
    Tk = {}
    a = {}
    b = {}
    zeta_next = {}
    L = {}
    diag_res = 0.0

    for k in range(1, n + 1):
        blocks = {(i, j): (eye.copy() if i == j else zero.copy())
                  for i in range(n) for j in range(n)}
        if k > 1:
            zk = sp.zeta[k]
            minors = {}
            for j in range(k):
                rows = tuple(r for r in range(k) if r != j)
                minors[j] = quantum_minor(rep, rows, tuple(range(k - 1)), h,
                                          shift=-(h / 2.0) * (k - 3))
            for i in range(k):
                pref = np.array([1.0 / np.prod([zk[p, i] - zk[p, l]
                                                for l in range(k) if l != i])
                                 for p in range(d)], dtype=complex)
                if not np.all(np.isfinite(pref)):
                    raise FiberwisePole(f"level-{k} root collision in prefactor")
                for j in range(k):
                    val = fiber_poly(minors[j], zk[:, i])
                    blocks[(i, j)] = ((-1) ** (k - 1 - j)) \
                        * (np.diag(pref) @ val)
        pk = _embed_blocks(blocks, n, d)
        P[k] = pk
        tk = pk @ ht @ np.linalg.inv(pk)
        Tk[k] = tk
        # verify the displayed diagonal block: zeta^k_i - h(k-1)/2 fiberwise
        for i in range(k):
            want = np.diag(sp.zeta[k][:, i] - h * (k - 1) / 2.0)
            got = tk[i * d:(i + 1) * d, i * d:(i + 1) * d]
            diag_res = max(diag_res, norm(got - want))
            for j in range(k):
                if j != i:
                    diag_res = max(diag_res, norm(
                        tk[i * d:(i + 1) * d, j * d:(j + 1) * d]))
        if k < n:
            a[k] = {j: tk[j * d:(j + 1) * d, k * d:(k + 1) * d].copy()
                    for j in range(k)}
            b[k] = {j: tk[k * d:(k + 1) * d, j * d:(j + 1) * d].copy()
                    for j in range(k)}
            znext = tk[k * d:(k + 1) * d, k * d:(k + 1) * d]
            off = norm(znext - np.diag(np.diag(znext)))
            if off > 1e-7 * max(1.0, norm(znext)):
                raise FiberwisePole(
                    f"(k+1,k+1) block of stage {k} not GZ-diagonal ({off:.2e})")
            zeta_next[k] = np.diag(znext).copy()

    for k in range(1, n):
        L[k + 1] = P[k] @ np.linalg.inv(P[k + 1])

    chain = QuantumChain(spectrum=sp, P=P, L=L, a=a, b=b, Tk=Tk,
                         zeta_next=zeta_next)
    chain.diagnostics["stage_form"] = diag_res
    sp.zeta_next = zeta_next
    return chain


def verify_quantum_identities(rep: Representation, sp: GZSpectrum,
                              chain: QuantumChain) -> dict:
    """Residuals of the commutator, product, and shift identities."""
    n, d, h = rep.n, rep.d, sp.h
    report = {}
    comm = 0.0
    for k in range(1, n):
        for j in range(k):
            aj = chain.a[k][j]
            for i in range(k):
                zi = np.diag(sp.zeta[k][:, i])
                want = (h if i == j else 0.0) * aj
                comm = max(comm, norm(aj @ zi - zi @ aj - want))
    report["commutator"] = comm

    prod = 0.0
    for k in range(1, n):
        z_k = sp.zeta[k]
        z_k1 = sp.zeta[k + 1]
        for i in range(k):
            lhs = chain.a[k][i] @ chain.b[k][i]
            rhs_vals = np.array([
                -np.prod([z_k[p, i] - z_k1[p, v] + h / 2.0
                          for v in range(k + 1)])
                / np.prod([z_k[p, i] - z_k[p, v]
                           for v in range(k) if v != i])
                for p in range(d)], dtype=complex)
            prod = max(prod, norm(lhs - np.diag(rhs_vals)))
    report["ab_product"] = prod

    shift = 0.0
    for k in range(1, n):
        for j in range(k):
            aj = chain.a[k][j]
            zj = np.diag(sp.zeta[k][:, j])
            # a_j lowers the zeta^k_j eigenvalue by h
            shift = max(shift, norm(zj @ aj - aj @ (zj - h * np.eye(d))))
    report["shift_property"] = shift
    return report
