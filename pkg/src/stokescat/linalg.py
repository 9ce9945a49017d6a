"""Dense complex linear algebra core.

Plain ``numpy`` complex arrays stand in for scalar matrices.  Matrices whose
entries are themselves operators on a d-dimensional space are held flattened
as a single (rows*d) x (cols*d) array by :class:`OperatorMatrix`; the entry
view is derived, never stored twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    DegenerateJointSpectrum,
    IndexOutOfBounds,
    NearDegenerateSpectrum,
    NonCommutingFamily,
    NotSquare,
    PoleOnSpectrum,
    ShapeMismatch,
    SingularPivot,
)


@dataclass(frozen=True)
class ToleranceConfig:
    eig_tol: float = 1e-8
    residual_tol: float = 1e-9
    ode_rel_tol: float = 1e-11
    ode_abs_tol: float = 1e-13
    series_tail_tol: float = 1e-14

    def __post_init__(self):
        for name in ("eig_tol", "residual_tol", "ode_rel_tol", "ode_abs_tol",
                     "series_tail_tol"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(entries) -> np.ndarray:
    """Validate and return a 2-d complex matrix (finite entries only)."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ShapeMismatch(f"expected a nonempty 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ShapeMismatch("matrix entries must be finite")
    return m


def norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=complex)))


def _require_square(a: np.ndarray):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"expected square matrix, got shape {a.shape}")


def canonical_order(eigenvalues, vectors=None):
    """Indices sorting eigenvalues by (Re, Im); ties by largest-component row.

    ``vectors`` (columns matching the eigenvalues) only matters for the tie
    break, which keeps the ordering deterministic for degenerate real parts.
    """
    lam = np.asarray(eigenvalues)
    keys = []
    for i, z in enumerate(lam):
        tie = int(np.argmax(np.abs(vectors[:, i]))) if vectors is not None else 0
        keys.append((round(z.real, 14), round(z.imag, 14), tie, i))
    return sorted(range(len(lam)), key=lambda i: keys[i])


def eig_diagonalizable(a, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigen-decomposition with canonical ordering and left eigenvectors.

    Returns ``(eigenvalues, right, left)`` with ``left @ a == diag(lam) @ left``
    and ``a @ right == right @ diag(lam)``, rows/columns normalized so that
    ``left @ right == Id``.
    """
    a = np.asarray(a, dtype=complex)
    _require_square(a)
    lam, v = np.linalg.eig(a)
    gaps = [abs(x - y) for x, y in combinations(lam, 2)]
    if gaps and min(gaps) <= tol.eig_tol:
        raise NearDegenerateSpectrum(
            f"minimal eigenvalue gap {min(gaps):.3e} <= eig_tol {tol.eig_tol:.1e}")
    order = canonical_order(lam, v)
    lam = lam[order]
    v = v[:, order]
    left = np.linalg.inv(v)
    return lam, v, left


def minor(a, row_idx, col_idx) -> complex:
    """Determinant of the submatrix picked by strictly increasing index lists."""
    a = np.asarray(a, dtype=complex)
    rows = list(row_idx)
    cols = list(col_idx)
    if len(rows) != len(cols):
        raise IndexOutOfBounds("row and column index lists must have equal length")
    for idx, bound in ((rows, a.shape[0]), (cols, a.shape[1])):
        if any(i < 0 or i >= bound for i in idx):
            raise IndexOutOfBounds(f"index out of bounds for shape {a.shape}")
        if any(x >= y for x, y in zip(idx, idx[1:])):
            raise IndexOutOfBounds("index lists must be strictly increasing")
    if not rows:
        return 1.0 + 0.0j
    sub = a[np.ix_(rows, cols)]
    return complex(np.linalg.det(sub))


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring of the Taylor series."""
    a = np.asarray(a)
    _require_square(a)
    nrm = np.linalg.norm(a, ord=1)
    squarings = max(0, int(np.ceil(np.log2(max(nrm, 1e-300) / 0.5))))
    x = a / (2.0 ** squarings)
    out = np.eye(a.shape[0], dtype=a.dtype if np.iscomplexobj(a) else complex)
    term = out.copy()
    for k in range(1, 40):
        term = term @ x / k
        out = out + term
        if np.linalg.norm(term) < 1e-20 * max(1.0, np.linalg.norm(out)):
            break
    for _ in range(squarings):
        out = out @ out
    return out


def gauss_ldu(m, block: int = 1):
    """Gauss decomposition ``m = L @ D @ U``.

    ``L`` is unit lower-, ``U`` unit upper-triangular and ``D`` diagonal, all
    at the level of ``block x block`` blocks (``block=1`` is the scalar case;
    larger blocks give the operator-entried decomposition, products taken in
    the noncommutative block ring).  Raises :class:`SingularPivot` with the
    failing leading-block index when a pivot block is not invertible.
    """
    m = np.asarray(m, dtype=complex)
    _require_square(m)
    n = m.shape[0]
    if n % block != 0:
        raise ShapeMismatch(f"size {n} not divisible by block {block}")
    k = n // block
    a = m.copy()
    lmat = np.eye(n, dtype=complex)
    umat = np.eye(n, dtype=complex)
    dmat = np.zeros_like(m)

    def blk(i, j):
        return slice(i * block, (i + 1) * block), slice(j * block, (j + 1) * block)

    for p in range(k):
        rp, cp = blk(p, p)
        pivot = a[rp, cp]
        cond_scale = max(norm(m), 1.0)
        try:
            pivot_inv = np.linalg.inv(pivot)
        except np.linalg.LinAlgError:
            raise SingularPivot(p + 1) from None
        if norm(pivot_inv) * norm(pivot) > 1e14 or norm(pivot) < 1e-14 * cond_scale:
            raise SingularPivot(p + 1)
        dmat[rp, cp] = pivot
        for i in range(p + 1, k):
            ri, _ = blk(i, p)[0], None
            lmat[ri, cp] = a[ri, cp] @ pivot_inv
        for j in range(p + 1, k):
            _, cj = None, blk(p, j)[1]
            umat[rp, cj] = pivot_inv @ a[rp, cj]
        for i in range(p + 1, k):
            for j in range(p + 1, k):
                ri, cj = blk(i, j)
                a[ri, cj] = a[ri, cj] - lmat[ri, cp] @ dmat[rp, cp] @ umat[rp, cj]
    return lmat, dmat, umat


def joint_diagonalize(family, tol: ToleranceConfig = DEFAULT_TOL):
    """Simultaneous eigenbasis of a commuting diagonalizable family.

    Returns ``(basis, table)``: columns of ``basis`` are joint eigenvectors,
    ``table[v][m]`` the eigenvalue of ``family[m]`` on column ``v``.  The
    joint spectrum must be simple.
    """
    mats = [np.asarray(f, dtype=complex) for f in family]
    if not mats:
        raise ShapeMismatch("empty family")
    d = mats[0].shape[0]
    for f in mats:
        _require_square(f)
        if f.shape[0] != d:
            raise ShapeMismatch("family members must share dimension")
    scale = [max(norm(f), 1.0) for f in mats]
    for (i, f), (j, g) in combinations(list(enumerate(mats)), 2):
        r = norm(f @ g - g @ f) / (scale[i] * scale[j])
        if r > max(tol.residual_tol, 1e-10) * 10:
            raise NonCommutingFamily(f"members {i},{j} commutator residual {r:.3e}")

    # Random self-adjoint-free linear combination separates the joint spectrum
    # generically; fall back to a second draw before giving up.
    rng = np.random.default_rng(1234)
    basis = None
    for _ in range(8):
        w = rng.normal(size=len(mats)) + 1j * rng.normal(size=len(mats))
        probe = sum(c * f for c, f in zip(w, mats))
        lam, v = np.linalg.eig(probe)
        if min((abs(x - y) for x, y in combinations(lam, 2)), default=1.0) > 1e-7:
            basis = v
            break
    if basis is None:
        raise DegenerateJointSpectrum("could not separate joint spectrum")

    vinv = np.linalg.inv(basis)
    table = np.empty((d, len(mats)), dtype=complex)
    for mi, f in enumerate(mats):
        diag = vinv @ f @ basis
        table[:, mi] = np.diag(diag)
        off = diag - np.diag(np.diag(diag))
        if norm(off) > max(tol.residual_tol, 1e-9) * 100 * scale[mi]:
            raise NonCommutingFamily(
                f"member {mi} not diagonal in joint basis, off-norm {norm(off):.3e}")
    tuples = [tuple(np.round(row, 7)) for row in table]
    if len(set(tuples)) != d:
        raise DegenerateJointSpectrum("joint eigenvalue tuples are not distinct")
    # normalize columns
    basis = basis / np.linalg.norm(basis, axis=0, keepdims=True)
    vinv = np.linalg.inv(basis)
    for mi, f in enumerate(mats):
        table[:, mi] = np.diag(vinv @ f @ basis)
    return basis, table


def fiberwise_apply(f, x, basis, basis_inv=None, pole_tol: float = 1e-12):
    """Operator acting as ``f(eigenvalue)`` on each column of ``basis``.

    ``x`` must be diagonal in the supplied joint eigenbasis; its per-column
    eigenvalues are read off there.  ``f`` maps complex scalars to complex
    scalars and may signal poles by raising; exact poles within ``pole_tol``
    are reported as :class:`PoleOnSpectrum`.
    """
    x = np.asarray(x, dtype=complex)
    basis = np.asarray(basis, dtype=complex)
    if basis_inv is None:
        basis_inv = np.linalg.inv(basis)
    diag = basis_inv @ x @ basis
    evals = np.diag(diag)
    if norm(diag - np.diag(evals)) > 1e-8 * max(1.0, norm(x)):
        raise PoleOnSpectrum("operator is not diagonal in the supplied basis")
    vals = []
    for z in evals:
        try:
            w = f(complex(z))
        except ZeroDivisionError:
            raise PoleOnSpectrum(f"f has a pole at eigenvalue {z}") from None
        if not np.isfinite(w.real) or not np.isfinite(w.imag):
            raise PoleOnSpectrum(f"f not finite at eigenvalue {z}")
        vals.append(w)
    return basis @ np.diag(vals) @ basis_inv


class OperatorMatrix:
    """Matrix with operator entries, stored flattened.

    The flattened array has shape ``(rows*d, cols*d)``; the ``(i, j)`` entry
    is the ``d x d`` block ``flat[i*d:(i+1)*d, j*d:(j+1)*d]``.
    """

    def __init__(self, flat, rows: int, cols: int):
        flat = np.asarray(flat, dtype=complex)
        if flat.shape != (rows * (flat.shape[0] // rows), flat.shape[1]):
            raise ShapeMismatch("bad flat shape")
        if flat.shape[0] % rows or flat.shape[1] % cols:
            raise ShapeMismatch(
                f"flat shape {flat.shape} incompatible with {rows}x{cols} blocks")
        d = flat.shape[0] // rows
        if flat.shape[1] // cols != d:
            raise ShapeMismatch("row and column block dimensions differ")
        if not np.all(np.isfinite(flat.view(float))):
            raise ShapeMismatch("entries must be finite")
        self.flat = flat
        self.rows = rows
        self.cols = cols
        self.d = d

    @classmethod
    def from_blocks(cls, blocks):
        """Build from a rows x cols nested list of d x d arrays."""
        rows = len(blocks)
        cols = len(blocks[0])
        d = np.asarray(blocks[0][0]).shape[0]
        flat = np.zeros((rows * d, cols * d), dtype=complex)
        for i in range(rows):
            for j in range(cols):
                b = np.asarray(blocks[i][j], dtype=complex)
                if b.shape != (d, d):
                    raise ShapeMismatch("all entries must share dimension d")
                flat[i * d:(i + 1) * d, j * d:(j + 1) * d] = b
        return cls(flat, rows, cols)

    def entry(self, i: int, j: int) -> np.ndarray:
        d = self.d
        return self.flat[i * d:(i + 1) * d, j * d:(j + 1) * d]

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.cols != other.rows or self.d != other.d:
            raise ShapeMismatch("operator matrix product shape mismatch")
        return OperatorMatrix(self.flat @ other.flat, self.rows, other.cols)

    def inv(self) -> "OperatorMatrix":
        if self.rows != self.cols:
            raise NotSquare("cannot invert a non-square operator matrix")
        return OperatorMatrix(np.linalg.inv(self.flat), self.rows, self.cols)

    def copy(self) -> "OperatorMatrix":
        return OperatorMatrix(self.flat.copy(), self.rows, self.cols)


def block_diag_embed(blocks) -> np.ndarray:
    """Block-diagonal matrix from a list of equal-size square blocks."""
    d = np.asarray(blocks[0]).shape[0]
    n = len(blocks)
    out = np.zeros((n * d, n * d), dtype=complex)
    for i, b in enumerate(blocks):
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] = b
    return out
