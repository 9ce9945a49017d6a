"""Ground-truth Stokes data of dF/dz = (iu + B/z) F by direct computation.

``u`` is a real diagonal (given by its entries, ties allowed) and ``B`` the
matrix coefficient of the simple pole at the origin.  In the classical
convention the residue term is written -(1/2*pi*i) A / z, so B = -A/(2*pi*i);
quantum systems use B = +h/(2*pi*i) T on the flattened representation space.

The two canonical solutions are evaluated by Borel summation: the Borel
transform of the formal power-series part satisfies a linear ODE in the Borel
variable with poles exactly at i*(u_l - u_j), is continued along rays by
Taylor stepping, and is Laplace-transformed back by panel Gauss-Legendre
quadrature.  The ray family determines the solution (windows centered on the
home sector):

    F_plus  : rays with arg t in (-pi/2,  pi/2)   (asymptotics on (-pi, pi))
    F_minus : rays with arg t in ( pi/2, 3pi/2)   (asymptotics on (-2pi, 0))

F_plus is evaluated at arg z = -3*pi/8 and carried clockwise across the
negative imaginary axis to -5*pi/8, where F_minus is evaluated directly; the
transition matrices then come from a single linear solve.  This is
convergent, so accuracy is limited by roundoff and quadrature, not by optimal
truncation of divergent series.

Sign conventions (fixed once, used everywhere):
    F_plus  = F_minus e^{-delta(A)/2} S_plus        (A := -2*pi*i B)
    F_minus(continued clockwise) = F_plus S_minus e^{+delta(A)/2}
    F_0 = F_plus C,      C e^{A} C^{-1} = S_minus S_plus
and the reflection identity S_minus(u, B) = S_plus(-u, B), which follows from
the half-turn z -> z e^{-i pi} applied to the defining relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationFailure, ResonantSystem, ShapeMismatch
from .linalg import ToleranceConfig, DEFAULT_TOL, expm, norm
from .special import branch_log

_TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# block structure of u (ties define the centralizer)

def _tie_mask(u, tol=1e-12):
    u = np.asarray(u, dtype=float)
    return np.abs(u[:, None] - u[None, :]) <= tol * max(1.0, np.max(np.abs(u)))


def centralizer_projection(m, u, tol=1e-12):
    """Projection of m onto the centralizer of diag(u) (blockwise diagonal)."""
    m = np.asarray(m, dtype=complex)
    return np.where(_tie_mask(u, tol), m, 0.0)


def pair_gaps(u, tol=1e-12):
    """Sorted distinct nonzero values |u_i - u_j|."""
    u = np.asarray(u, dtype=float)
    d = np.abs(u[:, None] - u[None, :]).ravel()
    d = d[d > tol * max(1.0, np.max(np.abs(u)))]
    out = []
    for x in np.sort(d):
        if not out or x - out[-1] > 1e-9 * max(1.0, x):
            out.append(float(x))
    return out


@dataclass
class LinearSystem:
    """u diagonal entries, pole coefficient B; block=d for flattened systems."""

    u: np.ndarray
    B: np.ndarray
    block: int = 1
    label: str = "classical"

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float).ravel()
        self.B = np.asarray(self.B, dtype=complex)
        n = self.u.size
        if self.B.shape != (n, n):
            raise ShapeMismatch(f"B shape {self.B.shape} does not match u size {n}")

    @property
    def a_eff(self) -> np.ndarray:
        """The matrix A with B = -A/(2 pi i)."""
        return -_TWO_PI_I * self.B

    @property
    def delta_b(self) -> np.ndarray:
        return centralizer_projection(self.B, self.u)

    def delta_a(self) -> np.ndarray:
        return centralizer_projection(self.a_eff, self.u)

    def norm_plus(self) -> np.ndarray:
        """e^{delta(A)/2}, the diagonal normalization of S_plus."""
        return expm(0.5 * self.delta_a())

    def reflected(self) -> "LinearSystem":
        return LinearSystem(-self.u, self.B.copy(), self.block, self.label)


@dataclass
class StokesData:
    Splus: np.ndarray
    Sminus: np.ndarray
    C: np.ndarray
    deltaA: np.ndarray
    residuals: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Borel-plane machinery

class _BorelRay:
    """Continuation of the Borel transform along one ray, plus its Laplace sum.

    The Borel transform hhat of the tail of the formal solution satisfies

        (t + ad_{iu}) hhat'(t) = -( (Id + B) hhat - hhat delta_B ),
        hhat(0) determined by the series recursion,

    with poles at t = i(u_l - u_j).  Steps store local Taylor polynomials so
    the Laplace quadrature can reuse them panel by panel.
    """

    def __init__(self, u, B, order=26):
        self.u = np.asarray(u, dtype=float)
        self.B = np.asarray(B, dtype=complex)
        self.n = self.u.size
        self.order = order
        self.delta_b = centralizer_projection(self.B, self.u)
        self.b_off = self.B - self.delta_b
        du = self.u[:, None] - self.u[None, :]
        self.ad_iu = 1j * du                       # entrywise multiplier
        self.tie = _tie_mask(self.u)
        self.sings = np.unique(np.round(-du[~self.tie].ravel(), 12)) if (~self.tie).any() else np.array([])
        # poles of the t-ODE sit at t = i*(u_l - u_j)
        self.gap = float(np.min(np.abs(self.sings))) if self.sings.size else 1.0
        self.span = float(np.max(np.abs(self.sings))) if self.sings.size else 1.0
        self._series0 = self._taylor_at_origin(40)

    # -- series at t = 0 ----------------------------------------------------
    def _taylor_at_origin(self, m_max):
        """Coefficients hhat_m of the Borel transform at t = 0."""
        coeffs = []
        n = self.n
        h_prev = None
        for m in range(m_max + 1):
            if m == 0:
                w = -self.b_off
            else:
                # m * [iu, hhat_m] = -m hhat_{m-1} - B hhat_{m-1} + hhat_{m-1} delta_B
                w = -(m * h_prev + self.B @ h_prev - h_prev @ self.delta_b) / m
            off = np.zeros((n, n), dtype=complex)
            off[~self.tie] = w[~self.tie] / self.ad_iu[~self.tie]
            # tie part from the next-order solvability constraint
            rhs = -centralizer_projection(self.b_off @ off, self.u)
            tie_part = self._solve_tie((m + 1), rhs)
            h = off + tie_part
            coeffs.append(h)
            h_prev = h
        return coeffs

    def _solve_tie(self, shift, rhs):
        """Solve (shift + ad_{delta_B}) X = rhs on the centralizer blocks."""
        n = self.n
        x = np.zeros((n, n), dtype=complex)
        seen = np.zeros(n, dtype=bool)
        for i in range(n):
            if seen[i]:
                continue
            idx = np.where(self.tie[i])[0]
            seen[idx] = True
            d = self.delta_b[np.ix_(idx, idx)]
            k = idx.size
            op = shift * np.eye(k * k, dtype=complex) \
                + np.kron(d, np.eye(k)) - np.kron(np.eye(k), d.T)
            x[np.ix_(idx, idx)] = np.linalg.solve(
                op, rhs[np.ix_(idx, idx)].reshape(-1)).reshape(k, k)
        return x

    def _eval_series0(self, t):
        tot = np.zeros((self.n, self.n), dtype=complex)
        tp = 1.0 + 0j
        for h in self._series0:
            tot += tp * h
            tp *= t
        return tot

    def _clearance(self, t):
        if not self.sings.size:
            return abs(t) + 1.0
        return float(np.min(np.abs(t - 1j * self.sings)))

    def _local_coeffs(self, t0, h0):
        """Taylor coefficients of hhat at base point t0 (t0 != 0, off poles)."""
        n = self.n
        denom0 = t0 + self.ad_iu
        coeffs = [h0]
        for k in range(self.order):
            w = -(self.B @ coeffs[k] + coeffs[k] @ (np.eye(n) - self.delta_b)
                  ) - k * coeffs[k]
            # (k+1)(t0 + ad_iu) c_{k+1} = w   [w = -(M[c_k] + k c_k)]
            coeffs.append(w / ((k + 1) * denom0))
        return coeffs

    def panels(self, phi, s_stop):
        """Step the ray t = s e^{i phi}, s in (0, s_stop]; yield panel polys.

        Returns a list of (s_lo, s_hi, coeffs, base_t) with coeffs the local
        Taylor polynomial of hhat about base_t = s_lo e^{i phi}.
        """
        e = complex(math.cos(phi), math.sin(phi))
        s0 = min(0.3 * self.gap, 0.25 * s_stop)
        out = [(0.0, s0, self._series0, 0.0 + 0j)]
        s = s0
        h_here = self._eval_series0(s * e)
        guard = 0
        while s < s_stop:
            t0 = s * e
            clear = self._clearance(t0)
            step = min(0.28 * clear, 0.55 * (abs(t0) + self.gap), s_stop - s)
            if step < 1e-8 * self.gap:
                raise IntegrationFailure("Borel ray passes too close to a singularity")
            coeffs = self._local_coeffs(t0, h_here)
            # tail sanity: last kept term must be small
            tail = norm(coeffs[-1]) * step ** self.order
            ref = max(norm(h_here), 1e-30)
            if tail > 1e-13 * ref:
                step *= 0.5
                tail = norm(coeffs[-1]) * step ** self.order
            out.append((s, s + step, coeffs, t0))
            dt = step * e
            new = np.zeros_like(h_here)
            tp = 1.0 + 0j
            for c in coeffs:
                new += tp * c
                tp *= dt
            h_here = new
            s += step
            guard += 1
            if guard > 4000:
                raise IntegrationFailure("too many Borel steps")
        return out

    def laplace(self, z, phi, tol=1e-15, nodes=24):
        """Id + int_0^{S e^{i phi}} e^{-z t} hhat(t) dt along the ray."""
        z = complex(z)
        e = complex(math.cos(phi), math.sin(phi))
        decay = (z * e).real
        if decay <= 0.05 * abs(z):
            raise IntegrationFailure(
                f"Laplace ray phi={phi:.3f} does not decay at arg z={np.angle(z):.3f}")
        s_stop = -math.log(tol) / decay * 1.15 + 2.0 / decay
        xs, ws = np.polynomial.legendre.leggauss(nodes)
        total = np.zeros((self.n, self.n), dtype=complex)
        for (s_lo, s_hi, coeffs, base_t) in self.panels(phi, s_stop):
            mid = 0.5 * (s_lo + s_hi)
            half = 0.5 * (s_hi - s_lo)
            for x, w in zip(xs, ws):
                s = mid + half * x
                t = s * e
                dt = t - base_t
                val = np.zeros_like(total)
                tp = 1.0 + 0j
                for c in coeffs:
                    val += tp * c
                    tp *= dt
                total += (w * half) * np.exp(-z * t) * val * e
        return np.eye(self.n, dtype=complex) + total


# ---------------------------------------------------------------------------
# Taylor transport of solutions in the z plane

def taylor_transport(u, B, f, z0, z1, order=26, max_steps=20000):
    """Continue the solution matrix f of F' = (iu + B/z) F from z0 to z1.

    Straight segment; the path must stay away from the origin.
    """
    u = np.asarray(u, dtype=float)
    B = np.asarray(B, dtype=complex)
    f = np.array(f, dtype=complex)
    iu = 1j * np.diag(u).astype(complex)
    z = complex(z0)
    z1 = complex(z1)
    seg = z1 - z
    length = abs(seg)
    if length == 0:
        return f
    direction = seg / length
    done = 0.0
    scale = max(np.max(np.abs(u)), 1e-3)
    steps = 0
    while done < length - 1e-14:
        r = abs(z)
        if r < 1e-9:
            raise IntegrationFailure("transport path passed through the origin")
        h = min(1.6 / scale, 0.38 * r, length - done)
        # Taylor coefficients: (k+1) F_{k+1} = iu F_k + B sum_j c_{k-j} F_j
        # with 1/z = sum_m (-1)^m dz^m / z^{m+1} about the base point.
        cs = [f]
        inv = [1.0 / z]
        for m in range(1, order + 1):
            inv.append(-inv[-1] / z)
        for k in range(order):
            g = sum(inv[k - j] * cs[j] for j in range(k + 1))
            cs.append((iu @ cs[k] + B @ g) / (k + 1))
        dz = h * direction
        new = np.zeros_like(f)
        tp = 1.0 + 0j
        for c in cs:
            new += tp * c
            tp *= dz
        tail = abs(tp / dz if dz != 0 else 0) and norm(cs[-1]) * abs(dz) ** order
        if tail > 1e-12 * max(norm(new), 1e-30) and h > 1e-6:
            # halve and retry once per loop iteration
            h *= 0.5
            dz = h * direction
            new = np.zeros_like(f)
            tp = 1.0 + 0j
            for c in cs:
                new += tp * c
                tp *= dz
        f = new
        z += dz
        done += h
        steps += 1
        if steps > max_steps:
            raise IntegrationFailure("too many transport steps")
    return f


def transport_path(u, B, f, points, **kw):
    out = np.array(f, dtype=complex)
    for a, b in zip(points[:-1], points[1:]):
        out = taylor_transport(u, B, out, a, b, **kw)
    return out


def arc_points(r, th0, th1, per_rad=8):
    m = max(2, int(abs(th1 - th0) * per_rad) + 1)
    ths = np.linspace(th0, th1, m)
    return [r * complex(math.cos(t), math.sin(t)) for t in ths]


# ---------------------------------------------------------------------------
# canonical solutions and Stokes data

_THETA_PLUS = -3.0 * math.pi / 8.0    # comfy evaluation angle for F_plus
_THETA_STAR = -5.0 * math.pi / 8.0    # extraction angle (inside Sect_minus)


def _env_exponent(sys: LinearSystem, z) -> np.ndarray:
    """E(z) = e^{iuz} z^{delta_B} (matrix), with the fixed log branch."""
    lz = branch_log(z)
    diag = np.diag(np.exp(1j * sys.u * z))
    return diag @ expm(sys.delta_b * lz)


def _radius(sys: LinearSystem) -> float:
    # Small radius keeps the extraction solve well conditioned (the dominance
    # spread grows like e^{span * r}); the Borel-Laplace evaluation converges
    # at any radius, the quadrature path just lengthens as r shrinks.
    gaps = pair_gaps(sys.u)
    span = gaps[-1] if gaps else 1.0
    return min(2.5, 6.0 / span) if span > 0 else 2.5


def canonical_solution(sys: LinearSystem, sector: int, z,
                       tol: ToleranceConfig = DEFAULT_TOL, phi=None):
    """Value of the canonical solution F_{+} (sector=+1) or F_{-} (-1) at z.

    z must lie where the corresponding Laplace representation converges
    (lower half plane in the wide sense; arg z in (-pi, 0) covers both).
    """
    z = complex(z)
    ray = _BorelRay(sys.u, sys.B)
    th = math.atan2(z.imag, z.real)
    margin = math.pi / 8.0
    if phi is None:
        phi = -th
        if sector > 0:
            phi = min(max(phi, -math.pi / 2 + margin), math.pi / 2 - margin)
        else:
            phi = min(max(phi, math.pi / 2 + margin), 3 * math.pi / 2 - margin)
    hhat = ray.laplace(z, phi, tol=min(tol.ode_abs_tol, 1e-14))
    return hhat @ _env_exponent(sys, z)


def stokes_plus(sys: LinearSystem, tol: ToleranceConfig = DEFAULT_TOL,
                radius=None):
    """S_plus with its e^{delta(A)/2} normalization, plus diagnostics."""
    r = radius if radius is not None else _radius(sys)
    z_star = r * complex(math.cos(_THETA_STAR), math.sin(_THETA_STAR))
    z_p = r * complex(math.cos(_THETA_PLUS), math.sin(_THETA_PLUS))
    f_plus = canonical_solution(sys, +1, z_p, tol)
    f_minus = canonical_solution(sys, -1, z_star, tol)
    # clockwise quarter turn of F_plus across the negative imaginary axis
    f_plus_cw = transport_path(sys.u, sys.B, f_plus,
                               arc_points(r, _THETA_PLUS, _THETA_STAR))
    k = np.linalg.solve(f_minus, f_plus_cw)
    s_plus = sys.norm_plus() @ k
    return s_plus


def stokes_minus(sys: LinearSystem, tol: ToleranceConfig = DEFAULT_TOL,
                 radius=None):
    """S_minus via the half-turn reflection S_minus(u, B) = S_plus(-u, B)."""
    return stokes_plus(sys.reflected(), tol, radius)


# -- Frobenius solution at the origin --------------------------------------

def _check_nonresonant(B):
    lam = np.linalg.eigvals(B)
    for i in range(lam.size):
        for j in range(lam.size):
            if i == j:
                continue
            d = lam[i] - lam[j]
            k = round(d.real)
            if k != 0 and abs(d - k) < 1e-8:
                raise ResonantSystem((lam[i], lam[j]))


def frobenius_coeffs(sys: LinearSystem, n_terms=60):
    """Coefficients H_m of F_0 = H(z) z^B, H entire, H_0 = Id."""
    _check_nonresonant(sys.B)
    n = sys.u.size
    iu = 1j * np.diag(sys.u).astype(complex)
    eye = np.eye(n, dtype=complex)
    kron_left = np.kron(sys.B, eye)
    kron_right = np.kron(eye, sys.B.T)
    coeffs = [eye]
    for m in range(1, n_terms + 1):
        rhs = (iu @ coeffs[-1]).reshape(-1)
        op = m * np.eye(n * n, dtype=complex) - kron_left + kron_right
        coeffs.append(np.linalg.solve(op, rhs).reshape(n, n))
    return coeffs


def frobenius_solution(sys: LinearSystem, z, n_terms=60,
                       tail_tol=1e-15):
    """F_0(z) near the origin: F_0 z^{-B} -> Id (i.e. F_0 z^{A/(2 pi i)} -> Id)."""
    z = complex(z)
    coeffs = frobenius_coeffs(sys, n_terms)
    h = np.zeros_like(coeffs[0])
    zp = 1.0 + 0j
    for m, c in enumerate(coeffs):
        term = zp * c
        h = h + term
        if m > 4 and norm(term) < tail_tol * max(1.0, norm(h)):
            break
        zp *= z
    return h @ expm(sys.B * branch_log(z))


def connection(sys: LinearSystem, tol: ToleranceConfig = DEFAULT_TOL,
               radius=None):
    """C with F_0 = F_plus C, extracted at the common evaluation point."""
    r = radius if radius is not None else _radius(sys)
    th_c = -math.pi / 8.0
    z_c = r * complex(math.cos(th_c), math.sin(th_c))
    f_plus = canonical_solution(sys, +1, z_c, tol)
    # bring F_0 out along the shallow ray (mild dominance mixing only)
    r0 = min(1.0, 0.25 * r)
    z0 = r0 * complex(math.cos(th_c), math.sin(th_c))
    f0 = frobenius_solution(sys, z0)
    f0 = transport_path(sys.u, sys.B, f0, [z0, z_c])
    return np.linalg.solve(f_plus, f0)


def verify_monodromy(sd: StokesData, residue_a) -> float:
    """|| C e^A C^{-1} - S_minus S_plus ||."""
    a = np.asarray(residue_a, dtype=complex)
    lhs = sd.C @ expm(a) @ np.linalg.inv(sd.C)
    return norm(lhs - sd.Sminus @ sd.Splus)


def _triangularity_residual(s, u, upper=True):
    u = np.asarray(u, dtype=float)
    tol = 1e-9 * max(1.0, np.max(np.abs(u)))
    bad = (u[:, None] > u[None, :] + tol) if upper else (u[:, None] < u[None, :] - tol)
    return norm(np.where(bad, s, 0.0))


def stokes_and_connection(sys: LinearSystem,
                          tol: ToleranceConfig = DEFAULT_TOL,
                          radius=None) -> StokesData:
    """Full Stokes data with monodromy and triangularity residuals."""
    s_plus = stokes_plus(sys, tol, radius)
    s_minus = stokes_minus(sys, tol, radius)
    c = connection(sys, tol, radius)
    sd = StokesData(Splus=s_plus, Sminus=s_minus, C=c, deltaA=sys.delta_a())
    sd.residuals["monodromy"] = verify_monodromy(sd, sys.a_eff)
    sd.residuals["triangularity_plus"] = _triangularity_residual(s_plus, sys.u, True)
    sd.residuals["triangularity_minus"] = _triangularity_residual(s_minus, sys.u, False)
    return sd


def classical_system(u, a_matrix) -> LinearSystem:
    """System dF/dz = (iu - A/(2 pi i z)) F."""
    a = np.asarray(a_matrix, dtype=complex)
    return LinearSystem(u, -a / _TWO_PI_I, label="classical")


def quantum_system(u_entries, t_flat, h: float, block: int) -> LinearSystem:
    """Flattened system dF/dz = (i u x Id + (h/2 pi i) T / z) F."""
    t = np.asarray(t_flat, dtype=complex)
    u = np.repeat(np.asarray(u_entries, dtype=float), block)
    return LinearSystem(u, (h / _TWO_PI_I) * t, block=block, label="quantum")
