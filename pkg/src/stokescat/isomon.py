"""Isomonodromic deformation flow of the residue matrix and Stokes drift.

The flow moves A along a path u(t) of regular diagonals so that the Stokes
data of dF/dz = (iu - A/(2 pi i z)) F stays constant; the right-hand side is
the commutator field with ad_u inverted entrywise on off-diagonal matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CollidingEigenvalues, IntegrationFailure
from .linalg import norm
from .oracle import classical_system, stokes_and_connection

_TWO_PI_I = 2j * math.pi


@dataclass
class Schedule:
    """u path t -> diag entries, plus checkpoint times."""

    u_of_t: callable
    t_grid: list

    def min_gap(self, t) -> float:
        u = np.asarray(self.u_of_t(t), dtype=float)
        gaps = [abs(x - y) for i, x in enumerate(u) for y in u[i + 1:]]
        return min(gaps) if gaps else 1.0


def poly_times_schedule(n: int, t_grid) -> Schedule:
    """The path u(t) = (t, t^2, ..., t^n)."""
    return Schedule(lambda t: np.array([t ** j for j in range(1, n + 1)]),
                    list(t_grid))


def iso_rhs(u, a_matrix) -> list:
    """dA/du_k for each k: the commutator field [A, ad_u^{-1} ad_{E_k} A]/(2 pi i).

    The sign is fixed by direct Stokes constancy against the integrator
    conventions used here (finite-difference calibrated).
    """
    u = np.asarray(u, dtype=float)
    a = np.asarray(a_matrix, dtype=complex)
    n = u.size
    gaps = u[:, None] - u[None, :]
    if np.any(np.abs(gaps + np.eye(n)) < 1e-12):
        raise CollidingEigenvalues("u entries collide")
    out = []
    for k in range(n):
        ek = np.zeros((n, n))
        ek[k, k] = 1.0
        x = ek @ a - a @ ek
        m = np.zeros_like(a)
        off = ~np.eye(n, dtype=bool)
        m[off] = x[off] / gaps[off]
        out.append((a @ m - m @ a) / _TWO_PI_I)
    return out


def hamiltonians(u, a_matrix) -> np.ndarray:
    """Quadratic flow Hamiltonians H_j = -(1/pi i) sum_{k != j} a_kj a_jk/(u_k-u_j).

    The sum runs over every k != j (the restriction to k < j reproduces only
    the last flow); the product pairs the (k, j) and (j, k) entries.
    """
    u = np.asarray(u, dtype=float)
    a = np.asarray(a_matrix, dtype=complex)
    n = u.size
    out = np.zeros(n, dtype=complex)
    for j in range(n):
        tot = 0.0 + 0.0j
        for k in range(n):
            if k == j:
                continue
            if abs(u[k] - u[j]) < 1e-12:
                raise CollidingEigenvalues("u entries collide")
            tot += a[k, j] * a[j, k] / (u[k] - u[j])
        out[j] = -tot / (1j * math.pi)
    return out


def _flow_rhs(t, a, schedule: Schedule, dt=1e-6):
    u = np.asarray(schedule.u_of_t(t), dtype=float)
    du = (np.asarray(schedule.u_of_t(t + dt), dtype=float)
          - np.asarray(schedule.u_of_t(t - dt), dtype=float)) / (2 * dt)
    partials = iso_rhs(u, a)
    return sum(du[k] * partials[k] for k in range(u.size))


def flow(a0, schedule: Schedule, rel_tol=1e-10, min_gap_factor=1e-3):
    """Integrate the deformation along the schedule; returns checkpoint states.

    Adaptive embedded Cash-Karp steps; steps are rejected if the u path's
    minimal gap shrinks below min_gap_factor times its initial value.
    """
    ts = list(schedule.t_grid)
    gap0 = schedule.min_gap(ts[0])
    states = [(ts[0], np.asarray(a0, dtype=complex).copy())]
    # Cash-Karp 5(4) tableau
    c = [0, 1 / 5, 3 / 10, 3 / 5, 1, 7 / 8]
    b5 = [37 / 378, 0, 250 / 621, 125 / 594, 0, 512 / 1771]
    b4 = [2825 / 27648, 0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4]
    aa = [[], [1 / 5], [3 / 40, 9 / 40], [3 / 10, -9 / 10, 6 / 5],
          [-11 / 54, 5 / 2, -70 / 27, 35 / 27],
          [1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096]]
    for seg in range(len(ts) - 1):
        t, t_end = ts[seg], ts[seg + 1]
        a = states[-1][1].copy()
        hstep = (t_end - t) / 50.0
        guard = 0
        while t < t_end - 1e-14:
            hstep = min(hstep, t_end - t)
            if schedule.min_gap(t + hstep) < min_gap_factor * gap0:
                raise CollidingEigenvalues("schedule approaches a collision")
            ks = []
            for i in range(6):
                ai = a + hstep * sum(aa[i][j] * ks[j] for j in range(i)) \
                    if i else a
                ks.append(_flow_rhs(t + c[i] * hstep, ai, schedule))
            a5 = a + hstep * sum(b5[i] * ks[i] for i in range(6))
            a4 = a + hstep * sum(b4[i] * ks[i] for i in range(6))
            err = norm(a5 - a4) / max(norm(a5), 1.0)
            if err < rel_tol:
                a = a5
                t += hstep
                hstep *= min(2.0, max(0.3, 0.9 * (rel_tol / max(err, 1e-300)) ** 0.2))
            else:
                hstep *= max(0.2, 0.9 * (rel_tol / err) ** 0.25)
            guard += 1
            if guard > 200000:
                raise IntegrationFailure("too many flow steps")
        states.append((t_end, a.copy()))
    return states


def spectral_drift(states) -> float:
    """Maximal drift of the eigenvalues of A across checkpoints."""
    base = np.sort_complex(np.linalg.eigvals(states[0][1]))
    worst = 0.0
    for _, a in states[1:]:
        ev = np.sort_complex(np.linalg.eigvals(a))
        worst = max(worst, float(np.max(np.abs(ev - base))))
    return worst


def stokes_drift(states, schedule: Schedule) -> dict:
    """Stokes matrices at each checkpoint and their maximal pairwise spread."""
    mats = []
    for t, a in states:
        u = np.asarray(schedule.u_of_t(t), dtype=float)
        sd = stokes_and_connection(classical_system(u, a))
        mats.append((sd.Splus, sd.Sminus))
    drift_p = max(norm(mats[i][0] - mats[j][0])
                  for i in range(len(mats)) for j in range(i + 1, len(mats)))
    drift_m = max(norm(mats[i][1] - mats[j][1])
                  for i in range(len(mats)) for j in range(i + 1, len(mats)))
    return {"drift_plus": float(drift_p), "drift_minus": float(drift_m)}


def hamiltonian_consistency(u, a_matrix, j: int) -> float:
    """Directional agreement of the H_j flow with the u_j deformation field.

    Compares the off-diagonal part of dA/du_j with the Hamiltonian vector
    field of H_j (numerical gradient, canonical bracket on off-diagonal
    entry pairs), as a relative deviation after one scalar fit.
    """
    u = np.asarray(u, dtype=float)
    a = np.asarray(a_matrix, dtype=complex)
    n = u.size
    rhs = iso_rhs(u, a)[j]
    eps = 1e-6
    grad = np.zeros_like(a)
    for p in range(n):
        for q in range(n):
            da = np.zeros_like(a)
            da[q, p] = eps
            hplus = hamiltonians(u, a + da)[j]
            hminus = hamiltonians(u, a - da)[j]
            grad[p, q] = (hplus - hminus) / (2 * eps)
    ham_field = grad @ a - a @ grad
    off = ~np.eye(n, dtype=bool)
    x = ham_field[off]
    y = rhs[off]
    if norm(x) < 1e-14:
        return float(norm(y))
    scale = np.vdot(x, y) / np.vdot(x, x)
    return float(norm(y - scale * x) / max(norm(y), 1e-14))
