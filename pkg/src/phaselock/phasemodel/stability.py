"""Root distribution of the linearized phase model and the stability verdict.

Linearizing the two-oscillator phase model about a locked solution and scaling
time by the delay eta gives the characteristic function

    Delta(lam) = lam^2 + eta*(a+b)*lam + eta^2*a*b*(1 - exp(-2*lam)).

lam = 0 is always a root (motion along the locked orbit). The solution is
asymptotically stable when that zero is simple and every other root lies in the
open left half-plane, which is decided by the signs of ab, a+b and
a + b + 2*eta*ab.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

MARGINAL_TOL = 1e-6


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


class RegionLabel(str, enum.Enum):
    POS_REAL_ROOT = "PosRealRoot"
    DOUBLE_ZERO = "DoubleZero"
    SIMPLE_ZERO_ONLY_STABLE = "SimpleZeroOnlyStable"
    TWO_ZERO_ROOTS = "TwoZeroRoots"
    ZERO_PLUS_NEGATIVE = "ZeroPlusNegative"
    ZERO_PLUS_POSITIVE = "ZeroPlusPositive"


@dataclass(frozen=True)
class RootRegion:
    label: RegionLabel
    details: tuple  # (sgn ab, sgn(a+b), sgn(a+b+2 eta ab)), zero within tolerance

    def __str__(self):
        return self.label.value


def characteristic_residual(lam, a, b, eta):
    lam = np.asarray(lam, dtype=complex)
    val = lam * lam + eta * (a + b) * lam + eta * eta * a * b * (1.0 - np.exp(-2.0 * lam))
    return complex(val) if val.ndim == 0 else val


def characteristic_derivative(lam, a, b, eta):
    """d Delta / d lam."""
    lam = np.asarray(lam, dtype=complex)
    val = 2 * lam + eta * (a + b) + 2 * eta * eta * a * b * np.exp(-2.0 * lam)
    return complex(val) if val.ndim == 0 else val


def _sgn(x, tol):
    return 0 if abs(x) < tol else (1 if x > 0 else -1)


def sign_triple(a, b, eta, tol=MARGINAL_TOL):
    return (_sgn(a * b, tol), _sgn(a + b, tol), _sgn(a + b + 2 * eta * a * b, tol))


def region_from_signs(s_ab, s_sum, s_third) -> RegionLabel:
    if s_ab == 0:
        if s_sum < 0:
            return RegionLabel.ZERO_PLUS_POSITIVE
        if s_sum == 0:
            return RegionLabel.TWO_ZERO_ROOTS
        return RegionLabel.ZERO_PLUS_NEGATIVE
    if s_ab > 0:
        if s_sum > 0:
            return RegionLabel.SIMPLE_ZERO_ONLY_STABLE
        if s_sum < 0:
            return RegionLabel.POS_REAL_ROOT
        return RegionLabel.DOUBLE_ZERO
    # ab < 0
    if s_sum <= 0 or s_third < 0:
        return RegionLabel.POS_REAL_ROOT
    if s_third == 0:
        return RegionLabel.DOUBLE_ZERO
    return RegionLabel.SIMPLE_ZERO_ONLY_STABLE


_VERDICT_OF_LABEL = {
    RegionLabel.SIMPLE_ZERO_ONLY_STABLE: Verdict.STABLE,
    RegionLabel.ZERO_PLUS_NEGATIVE: Verdict.STABLE,
    RegionLabel.POS_REAL_ROOT: Verdict.UNSTABLE,
    RegionLabel.ZERO_PLUS_POSITIVE: Verdict.UNSTABLE,
    RegionLabel.DOUBLE_ZERO: Verdict.MARGINAL,
    RegionLabel.TWO_ZERO_ROOTS: Verdict.MARGINAL,
}


def verdict_from_signs(signs) -> Verdict:
    """Verdict for a sign triple; signs within tolerance (0) are resolved by
    checking every strict completion and answering Marginal unless they agree."""
    undecided = [i for i, s in enumerate(signs) if s == 0]
    if not undecided:
        return _VERDICT_OF_LABEL[region_from_signs(*signs)]
    outcomes = set()
    for fill in itertools.product((-1, 1), repeat=len(undecided)):
        trial = list(signs)
        for i, s in zip(undecided, fill):
            trial[i] = s
        outcomes.add(_VERDICT_OF_LABEL[region_from_signs(*trial)])
    return outcomes.pop() if len(outcomes) == 1 else Verdict.MARGINAL


def classify_ab(a, b, eta, marginal_tol=MARGINAL_TOL):
    """Root region and verdict for linearization coefficients (a, b) at delay eta."""
    signs = sign_triple(a, b, eta, marginal_tol)
    return RootRegion(region_from_signs(*signs), signs), verdict_from_signs(signs)


def linearization_coefficients(psi, omega, cfg, h):
    """a = H'(psi - omega*eta - Omega*tau)/Omega, b = H'(-psi - omega*eta - Omega*tau)/Omega."""
    c = omega * cfg.eta + cfg.Omega * cfg.tau
    return h.prime(psi - c) / cfg.Omega, h.prime(-psi - c) / cfg.Omega


def classify_stability(psi, omega, cfg, h, marginal_tol=MARGINAL_TOL):
    """Returns (a, b, RootRegion, Verdict) for the locked solution (psi, omega)."""
    a, b = linearization_coefficients(psi, omega, cfg, h)
    region, verdict = classify_ab(a, b, cfg.eta, marginal_tol)
    return a, b, region, verdict
