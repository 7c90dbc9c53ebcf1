"""Closed-form reduction when H keeps only its constant and first harmonic.

With H(phi) = a0 + a1 cos(phi) + b1 sin(phi) and c = omega*eta + Omega*tau,

    A(omega) = b1 cos(c) + a1 sin(c)
    B(omega) = a1 cos(c) - b1 sin(c)

the in-phase and anti-phase frequencies solve Omega*omega - a0 = +B and -B. An
out-of-phase solution needs A(omega) = 0 and then cos(psi) = (Omega*omega - a0)/B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import PhaseConfig
from .roots import all_roots

RATIO_TOL = 1e-9


@dataclass(frozen=True)
class OutOfPhaseCase:
    omega: float
    ratio: float  # (Omega*omega - a0) / B(omega)
    outcome: str  # "pair", "pitchfork" or "none"
    psi: tuple = ()


@dataclass(frozen=True)
class FirstModeReport:
    in_phase: list
    anti_phase: list
    cases: list = field(default_factory=list)

    @property
    def out_of_phase(self):
        """(psi, omega) pairs of every out-of-phase solution."""
        return [(p, c.omega) for c in self.cases if c.outcome == "pair" for p in c.psi]

    @property
    def pitchforks(self):
        return [(c.psi[0], c.omega) for c in self.cases if c.outcome == "pitchfork"]


def first_mode_analysis(a0: float, a1: float, b1: float, cfg: PhaseConfig,
                        n_samples: int = 4096) -> FirstModeReport:
    if a1 == 0 and b1 == 0:
        raise ValueError("first harmonic must not vanish")
    eta, shift, Om = cfg.eta, cfg.shift, cfg.Omega
    half = (abs(a0) + np.hypot(a1, b1)) / Om
    if eta > 0:
        n_samples = max(n_samples, int(2 * half * eta / (2 * np.pi) * 64) + 1)

    def A(w):
        c = np.asarray(w) * eta + shift
        return b1 * np.cos(c) + a1 * np.sin(c)

    def B(w):
        c = np.asarray(w) * eta + shift
        return a1 * np.cos(c) - b1 * np.sin(c)

    def dA(w):
        return eta * B(w)

    def dB(w):
        return -eta * A(w)

    lo, hi = -half - 1e-9, half + 1e-9
    in_phase = all_roots(lambda w: Om * np.asarray(w) - a0 - B(w),
                         lambda w: Om - dB(w), lo, hi, n_samples)
    anti_phase = all_roots(lambda w: Om * np.asarray(w) - a0 + B(w),
                           lambda w: Om + dB(w), lo, hi, n_samples)
    cases = []
    if eta == 0:
        candidates = [] if abs(A(0.0)) > 1e-14 else None
    else:
        candidates = all_roots(A, dA, lo, hi, n_samples)
    if candidates is None:
        raise ValueError("A vanishes identically; the out-of-phase family is a continuum")
    for w in candidates:
        bw = float(B(w))
        ratio = (Om * w - a0) / bw if bw != 0 else np.inf
        if abs(abs(ratio) - 1) <= RATIO_TOL:
            psi = 0.0 if ratio > 0 else float(np.pi)
            cases.append(OutOfPhaseCase(float(w), float(ratio), "pitchfork", (psi,)))
        elif abs(ratio) < 1:
            p = float(np.arccos(ratio))
            cases.append(OutOfPhaseCase(float(w), float(ratio), "pair", (p, 2 * np.pi - p)))
        else:
            cases.append(OutOfPhaseCase(float(w), float(ratio), "none"))
    return FirstModeReport([float(w) for w in in_phase], [float(w) for w in anti_phase], cases)
