"""Quasi-static stepping of a point tool against rigid surfaces.

The tool has no mass. Each step solves the implicit first-order balance

    (D/dt) (x' - x) = K (x* - x') + F_ext + F_c

where ``F_c`` is the contact force. Without contact this is a linear solve
``A x' = b`` with ``A = (D/dt) I + K`` and ``b = (D/dt) x + K x* + F_ext``.
With one active surface the surface is linearized at the closest point and
the Coulomb problem (stick or slip with ``|F_t| = mu F_N``) is solved on that
tangent plane. When two surfaces are active at once, or the tool crosses the
funnel axis at the apex, the tool is wedged on the intersection.
"""
from __future__ import annotations

from dataclasses import replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .controller import ControllerState
from .environment import Environment, Funnel

PENETRATION_TOL = 1e-9

NO_SURFACE = -1
MULTIPLE_SURFACES = -2


class Contact(NamedTuple):
    """Contact force split into normal and tangential parts.

    ``normal_force`` is the scalar ``F_N``; ``force = F_N n + friction``.
    ``mode`` is one of ``free``, ``stick``, ``slip``, ``wedged``.
    """

    force: np.ndarray
    normal: np.ndarray
    normal_force: float
    friction: np.ndarray
    surface: int
    mode: str


FREE_CONTACT = Contact(np.zeros(3), np.zeros(3), 0.0, np.zeros(3), NO_SURFACE, "free")


def _tangent_basis(n):
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    t1 = np.cross(n, helper)
    t1 /= np.linalg.norm(t1)
    return np.column_stack([t1, np.cross(n, t1)])


def _slip_displacement(M, r, mu_lam, evals, evecs):
    """Tangential displacement ``s`` with ``M s + mu_lam s/|s| = r``.

    Writing ``s = rho * y`` with ``|y| = 1`` gives ``y = (rho M + mu_lam I)^-1 r``;
    ``rho`` is the root of ``|y(rho)| = 1``.
    """
    rn = np.linalg.norm(r)
    if mu_lam >= rn:
        return np.zeros(2)
    if mu_lam <= 0:
        return np.linalg.solve(M, r)
    rt = evecs.T @ r

    def g(rho):
        # g(0) may overflow to +inf for a tiny mu_lam; the bracket still holds
        with np.errstate(over="ignore"):
            return np.linalg.norm(rt / (rho * evals + mu_lam)) - 1.0

    hi = (rn - mu_lam) / evals.min() + 1e-12
    rho = brentq(g, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return rho * (evecs @ (rt / (rho * evals + mu_lam)))


def solve_single_contact(A, b, x_p, n, mu):
    """Coulomb contact on the plane through ``x_p`` with normal ``n``.

    Returns ``(x_new, lam, friction, mode)`` where ``friction`` is the 3-D
    tangential contact force.
    """
    T = _tangent_basis(n)
    lam0 = float(n @ (A @ x_p - b))
    r = T.T @ (b - A @ x_p)
    rn = float(np.linalg.norm(r))
    if lam0 >= 0 and rn <= mu * lam0:
        return x_p.copy(), lam0, -(T @ r), "stick"
    M = T.T @ A @ T
    c = T.T @ A @ n
    scale = np.abs(A).max()
    evals, evecs = np.linalg.eigh(M)
    isotropic = np.abs(c).max() <= 1e-14 * scale and evals[1] - evals[0] <= 1e-14 * scale
    if isotropic:
        lam = lam0
        s = max(0.0, rn - mu * lam) / evals[0] * (r / rn) if rn > 0 else np.zeros(2)
    else:
        s_free = np.linalg.solve(M, r)
        lam_free = lam0 + float(c @ s_free)
        if lam_free <= 0 or mu == 0:
            lam, s = max(lam_free, 0.0), s_free
        else:
            def h(lam):
                return lam - lam0 - float(c @ _slip_displacement(M, r, mu * lam, evals, evecs))

            # |s| <= |r| / min eig(M) bounds c.s, so h(hi) > 0
            hi = max(lam0, 0.0) + np.linalg.norm(c) * rn / evals[0] + 1.0
            lam = brentq(h, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            s = _slip_displacement(M, r, mu * lam, evals, evecs)
    sn = np.linalg.norm(s)
    if sn == 0:
        return x_p.copy(), lam, -(T @ r), "stick"
    friction = -mu * lam * (T @ s) / sn
    return x_p + T @ s, lam, friction, "slip"


def _wedge_point(env: Environment, idx, x, x_ref):
    """Rest position when pinned by several surfaces or at a funnel apex."""
    surfs = [env.surfaces[i] for i in idx]
    funnels = [s for s in surfs if isinstance(s, Funnel)]
    if funnels:
        return funnels[0].apex.copy()
    if len(surfs) >= 2:
        n1, n2 = surfs[0].normal, surfs[1].normal
        line = np.cross(n1, n2)
        ln = np.linalg.norm(line)
        if ln > 1e-12:
            line /= ln
            # a point on both planes, then the closest line point to the tool
            N = np.array([n1, n2, line])
            rhs = np.array([n1 @ surfs[0].point, n2 @ surfs[1].point, line @ x_ref])
            return np.linalg.solve(N, rhs)
    return x_ref


def _reference_point(surface, x, x_free):
    """Point on the linearized surface from which the contact solve starts.

    Approaching from free space this is where the segment ``x -> x_free``
    crosses the tangent plane, otherwise the projection of ``x``.
    """
    q, n = surface.closest(x_free)
    c = n @ q
    d0 = n @ x - c
    d1 = n @ x_free - c
    if d0 > 1e-12 and d1 < d0:
        return x + (x_free - x) * (d0 / (d0 - d1)), n
    return x - d0 * n, n


def step(state: ControllerState, env: Environment):
    """Advance one time step; returns the new state and the :class:`Contact`."""
    a = state.D / state.dt
    A = a * np.eye(3) + state.K
    b = a * state.position + state.K @ state.setpoint + state.external_force
    x = state.position
    x_free = np.linalg.solve(A, b)
    active = env.penetrating(x_free, PENETRATION_TOL)
    contact = FREE_CONTACT
    x_new = x_free
    if active:
        depth = env.signed_distances(x_free)
        solved = False
        for i in sorted(active, key=lambda j: depth[j]):
            surf = env.surfaces[i]
            x_p, n = _reference_point(surf, x, x_free)
            cand, lam, fric, mode = solve_single_contact(A, b, x_p, n, env.mu)
            if surf.curved:
                if isinstance(surf, Funnel) and surf.crossed_apex(x_p, cand):
                    break
                cand = surf.project(cand)
            if env.penetrating(cand, PENETRATION_TOL):
                continue
            x_new = cand
            contact = Contact(lam * n + fric, n, lam, fric, i, mode)
            solved = True
            break
        if not solved:
            x_new = _wedge_point(env, active, x, x)
            f = A @ x_new - b
            fn = float(np.linalg.norm(f))
            contact = Contact(f, f / fn if fn > 0 else np.zeros(3), fn, np.zeros(3), MULTIPLE_SURFACES, "wedged")
    v = (x_new - x) / state.dt
    return replace(state, position=x_new, velocity=v), contact
