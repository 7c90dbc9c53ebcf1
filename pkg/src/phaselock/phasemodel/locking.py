"""Phase-locked solutions of the two-cell delayed phase model.

A locked solution has phase difference psi and frequency deviation omega with

    omega = H( psi - omega*eta - Omega*tau) / Omega
    omega = H(-psi - omega*eta - Omega*tau) / Omega

psi = 0 and psi = pi satisfy the second equation whenever they satisfy the
first, which leaves a scalar problem in omega. Any other psi is found on the
(psi, omega) plane.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateContinuum
from ..oscillator.interaction import InteractionFunction
from .config import Kind, PhaseConfig, PhaseLockedSolution
from .roots import DEDUP_TOL, all_roots
from .stability import MARGINAL_TOL, classify_ab, classify_stability

TWO_PI = 2 * np.pi
EDGE_TOL = 1e-6  # out-of-phase candidates this close to 0 or pi are in/anti-phase


def residual_F(omega, arg, cfg: PhaseConfig, h: InteractionFunction):
    """omega - H(arg - omega*eta - Omega*tau) / Omega."""
    omega = np.asarray(omega, dtype=float)
    val = omega - h(arg - omega * cfg.eta - cfg.shift) / cfg.Omega
    return float(val) if np.ndim(val) == 0 else val


def residual_F_domega(omega, arg, cfg, h):
    omega = np.asarray(omega, dtype=float)
    val = 1.0 + cfg.eta * h.prime(arg - omega * cfg.eta - cfg.shift) / cfg.Omega
    return float(val) if np.ndim(val) == 0 else val


def omega_bracket(cfg, h) -> float:
    return h.bound() / cfg.Omega + 1.0


def _samples_needed(cfg, h, half_width, n_min, per_period=64):
    if cfg.eta == 0:
        return n_min
    # H(.. - omega*eta ..) oscillates in omega with shortest period 2pi/(K*eta)
    periods = 2 * half_width * h.K * cfg.eta / TWO_PI
    return max(n_min, int(math.ceil(periods * per_period)) + 1)


def _solution(psi, omega, kind, cfg, h, marginal_tol):
    a, b, region, verdict = classify_stability(psi, omega, cfg, h, marginal_tol)
    return PhaseLockedSolution(psi, omega, kind, float(a), float(b), region, verdict, cfg.tau)


def find_locked_frequencies(psi_star, cfg: PhaseConfig, h: InteractionFunction,
                            n_samples: int = 4096, marginal_tol: float = MARGINAL_TOL):
    """All omega with residual_F(omega, psi_star) = 0 for psi_star in {0, pi}."""
    if abs(psi_star) < 1e-12:
        psi_star, kind = 0.0, Kind.IN_PHASE
    elif abs(psi_star - np.pi) < 1e-12:
        psi_star, kind = float(np.pi), Kind.ANTI_PHASE
    else:
        raise ValueError("psi_star must be 0 or pi")
    half = omega_bracket(cfg, h)
    n = _samples_needed(cfg, h, half, n_samples)
    roots = all_roots(lambda w: residual_F(w, psi_star, cfg, h),
                      lambda w: residual_F_domega(w, psi_star, cfg, h),
                      -half, half, n)
    return [_solution(psi_star, w, kind, cfg, h, marginal_tol) for w in roots]


# -- out-of-phase ---------------------------------------------------------------
#
# Subtracting the two equations gives sum_k 2 sin(k psi) [a_k sin(kc) + b_k cos(kc)]
# with c = omega*eta + Omega*tau. Dividing by sin(psi) (Chebyshev U_{k-1}) removes
# the trivial psi = 0, pi families, so Newton is not drawn onto them. The
# average of the two equations completes the system. Both parts are even in psi,
# so it is enough to search psi in [0, pi] and mirror.


def _chebyshev_u(x, K):
    """U_0..U_{K-1} evaluated at x, stacked on the last axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (K,))
    out[..., 0] = 1.0
    if K > 1:
        out[..., 1] = 2 * x
    for k in range(2, K):
        out[..., k] = 2 * x * out[..., k - 1] - out[..., k - 2]
    return out


def _reduced_system(psi, omega, eta, shift, Omega, h):
    c = omega * eta + shift
    k = np.arange(1, h.K + 1)
    kc = np.multiply.outer(c, k)
    weights = h.a[1:] * np.sin(kc) + h.b * np.cos(kc)
    diff = np.sum(_chebyshev_u(np.cos(psi), h.K) * weights, axis=-1)
    avg = omega - 0.5 * (h(psi - c) + h(-psi - c)) / Omega
    return diff, avg


def _full_residual(psi, omega, eta, shift, Omega, h):
    c = omega * eta + shift
    return np.array([omega - h(psi - c) / Omega, omega - h(-psi - c) / Omega])


def _full_jacobian(psi, omega, eta, shift, Omega, h):
    c = omega * eta + shift
    a = h.prime(psi - c) / Omega
    b = h.prime(-psi - c) / Omega
    # columns: d/dpsi, d/domega
    return np.array([[-a, 1 + eta * a], [b, 1 + eta * b]])


def _reduced_jacobian(psi, omega, eta, shift, Omega, h, step=1e-7):
    base = np.array(_reduced_system(psi, omega, eta, shift, Omega, h))
    dpsi = (np.array(_reduced_system(psi + step, omega, eta, shift, Omega, h)) - base) / step
    dom = (np.array(_reduced_system(psi, omega + step, eta, shift, Omega, h)) - base) / step
    return base, np.column_stack([dpsi, dom])


def _damped_newton(x, fun, jac, iters=60, tol=1e-13):
    r = fun(x)
    for _ in range(iters):
        J = jac(x)
        try:
            dx = np.linalg.lstsq(J, -r, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        norm = np.linalg.norm(r)
        while t > 1e-4:
            trial = x + t * dx
            rt = fun(trial)
            if np.linalg.norm(rt) < (1 - 0.25 * t) * norm or np.linalg.norm(rt) < tol:
                break
            t *= 0.5
        else:
            break  # no further decrease: at the rounding floor or stuck
        x, r = trial, rt
        if np.linalg.norm(r) < tol or np.linalg.norm(t * dx) < 1e-15:
            break
    return x if np.linalg.norm(r) < 1e-10 else None


def _check_continuum(x, eta, shift, Omega, h, delta=1e-3):
    """Raise DegenerateContinuum if solutions persist along the null direction."""
    J = _full_jacobian(x[0], x[1], eta, shift, Omega, h)
    s = np.linalg.svd(J, compute_uv=False)
    if s[-1] > 1e-9 * max(1.0, s[0]):
        return
    _, _, vt = np.linalg.svd(J)
    null, normal = vt[-1], vt[0]
    for sign in (1.0, -1.0):
        p = x + sign * delta * null

        def along_normal(t):
            q = p + t[0] * normal
            return _full_residual(q[0], q[1], eta, shift, Omega, h)

        t = np.zeros(1)
        for _ in range(30):
            r = along_normal(t)
            d = (along_normal(t + 1e-8) - r) / 1e-8
            t = t - np.array([float(d @ r) / max(float(d @ d), 1e-300)])
        if np.linalg.norm(along_normal(t)) > 1e-11:
            return
    raise DegenerateContinuum(
        f"curve of out-of-phase solutions through psi={x[0]:.6g}, omega={x[1]:.6g}")


def _out_of_phase_points(eta, shift, Omega, h, half, n_psi, n_omega):
    psis = np.linspace(0.0, np.pi, n_psi)
    omegas = np.linspace(-half, half, n_omega)
    P, W = np.meshgrid(psis, omegas, indexing="ij")
    diff, avg = _reduced_system(P, W, eta, shift, Omega, h)

    def crosses(field):
        s = np.sign(field)
        corners = np.stack([s[:-1, :-1], s[1:, :-1], s[:-1, 1:], s[1:, 1:]])
        return (corners.max(axis=0) > 0) & (corners.min(axis=0) < 0) | np.any(corners == 0, axis=0)

    both = crosses(diff) & crosses(avg)
    # allow the two curves to cross in neighbouring cells
    grown = both.copy()
    grown[1:, :] |= both[:-1, :]
    grown[:-1, :] |= both[1:, :]
    grown[:, 1:] |= both[:, :-1]
    grown[:, :-1] |= both[:, 1:]
    seeds = [(0.5 * (psis[i] + psis[i + 1]), 0.5 * (omegas[j] + omegas[j + 1]))
             for i, j in zip(*np.nonzero(grown))]

    def fun(x):
        return np.array(_reduced_system(x[0], x[1], eta, shift, Omega, h))

    def jac(x):
        return _reduced_jacobian(x[0], x[1], eta, shift, Omega, h)[1]

    def full_fun(x):
        return _full_residual(x[0], x[1], eta, shift, Omega, h)

    def full_jac(x):
        return _full_jacobian(x[0], x[1], eta, shift, Omega, h)

    found = []
    for seed in seeds:
        x = _damped_newton(np.array(seed), fun, jac)
        if x is None:
            continue
        psi = float(np.mod(x[0], TWO_PI))
        if psi > np.pi:
            psi = TWO_PI - psi
        x = np.array([psi, x[1]])
        if psi < EDGE_TOL or np.pi - psi < EDGE_TOL or abs(x[1]) > half:
            continue
        polished = _damped_newton(x, full_fun, full_jac, iters=5, tol=1e-15)
        if polished is not None and EDGE_TOL < polished[0] < np.pi - EDGE_TOL:
            x = polished
        _check_continuum(x, eta, shift, Omega, h)
        if all(np.hypot(x[0] - y[0], x[1] - y[1]) > DEDUP_TOL for y in found):
            found.append(x)
    return found


def _check_on_continuum(on_continuum):
    if on_continuum not in ("raise", "skip"):
        raise ValueError("on_continuum must be 'raise' or 'skip'")


def find_out_of_phase(cfg: PhaseConfig, h: InteractionFunction, grid=(256, 256),
                      marginal_tol: float = MARGINAL_TOL, on_continuum: str = "raise"):
    """All locked solutions with psi outside {0, pi}, reported in mirror pairs.

    A curve of solutions (constant H, for example) raises DegenerateContinuum;
    with ``on_continuum="skip"`` the result is empty instead.
    """
    _check_on_continuum(on_continuum)
    n_psi, n_omega = grid
    if n_psi < 64 or n_omega < 64:
        raise ValueError("grid resolutions must be at least 64")
    half = omega_bracket(cfg, h)
    n_omega = _samples_needed(cfg, h, half, n_omega, per_period=16)
    try:
        points = _out_of_phase_points(cfg.eta, cfg.shift, cfg.Omega, h, half,
                                      n_psi // 2 + 1, n_omega)
    except DegenerateContinuum:
        if on_continuum == "raise":
            raise
        return []
    sols = []
    for psi, omega in points:
        for p in (psi, TWO_PI - psi):
            sols.append(_solution(float(p), float(omega), Kind.OUT_OF_PHASE, cfg, h, marginal_tol))
    sols.sort(key=PhaseLockedSolution.sort_key)
    return sols


def find_all_locked(cfg, h, n_samples=4096, grid=(256, 256), marginal_tol=MARGINAL_TOL):
    sols = (find_locked_frequencies(0.0, cfg, h, n_samples, marginal_tol)
            + find_locked_frequencies(np.pi, cfg, h, n_samples, marginal_tol)
            + find_out_of_phase(cfg, h, grid, marginal_tol))
    sols.sort(key=PhaseLockedSolution.sort_key)
    return sols


# -- small delay ----------------------------------------------------------------

def small_delay_solutions(cfg: PhaseConfig, h: InteractionFunction, n_samples: int = 4096,
                          marginal_tol: float = MARGINAL_TOL, on_continuum: str = "raise"):
    """Locked phase differences when the delay only shifts the phase by Omega*tau.

    Solves H(phi - Omega*tau) = H(-phi - Omega*tau). The solution is stable when
    H'(phi - Omega*tau) + H'(-phi - Omega*tau) > 0. If every phi solves it, the
    result is DegenerateContinuum, or just phi = 0 and pi with ``on_continuum="skip"``.
    """
    _check_on_continuum(on_continuum)
    shift = cfg.shift
    k = np.arange(1, h.K + 1)
    weights = h.a[1:] * np.sin(k * shift) + h.b * np.cos(k * shift)
    degenerate = bool(np.all(np.abs(weights) < 1e-14))
    if degenerate and on_continuum == "raise":
        raise DegenerateContinuum("every phase difference is locked at this delay")

    def reduced(phi):
        return np.sum(_chebyshev_u(np.cos(phi), h.K) * weights, axis=-1)

    def reduced_prime(phi, step=1e-7):
        return (reduced(phi + step) - reduced(phi - step)) / (2 * step)

    interior = [] if degenerate else [
        p for p in all_roots(reduced, reduced_prime, 0.0, np.pi, n_samples)
        if EDGE_TOL < p < np.pi - EDGE_TOL]
    phis = [0.0, float(np.pi)] + interior + [TWO_PI - p for p in interior]
    sols = []
    for phi in phis:
        a = h.prime(phi - shift) / cfg.Omega
        b = h.prime(-phi - shift) / cfg.Omega
        region, verdict = classify_ab(a, b, 0.0, marginal_tol)
        omega = h(phi - shift) / cfg.Omega
        if phi == 0.0:
            kind = Kind.IN_PHASE
        elif phi == np.pi:
            kind = Kind.ANTI_PHASE
        else:
            kind = Kind.OUT_OF_PHASE
        sols.append(PhaseLockedSolution(phi, float(omega), kind, float(a), float(b),
                                        region, verdict, cfg.tau))
    sols.sort(key=PhaseLockedSolution.sort_key)
    return sols
