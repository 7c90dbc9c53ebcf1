"""Truncated Fourier interaction function H and its construction from a cycle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, GridMismatch, InsufficientSamples
from .adjoint import AdjointSolution
from .limit_cycle import LimitCycle
from .models import CouplingFunction

DEFAULT_K = 4


@dataclass(frozen=True)
class InteractionFunction:
    """H(phi) = a[0] + sum_k a[k] cos(k phi) + b[k-1] sin(k phi), k = 1..K."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float).ravel()
        if a.size != b.size + 1:
            raise ValueError(f"need len(a) == len(b) + 1, got {a.size} and {b.size}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def K(self) -> int:
        return self.b.size

    @classmethod
    def zero(cls, K: int = DEFAULT_K) -> "InteractionFunction":
        return cls(np.zeros(K + 1), np.zeros(K))

    def derivative(self, phi, order: int = 0):
        """order-th derivative of H at ``phi`` (scalar or array)."""
        phi = np.asarray(phi, dtype=float)
        k = np.arange(1, self.K + 1)
        arg = np.multiply.outer(np.mod(phi, 2 * np.pi), k)
        c, s = np.cos(arg), np.sin(arg)
        # d^n/dx^n of cos(kx), sin(kx) cycles through (c, -s, -c, s) * k^n
        kn = k.astype(float) ** order
        r = order % 4
        if r == 0:
            val = c @ (self.a[1:] * kn) + s @ (self.b * kn)
        elif r == 1:
            val = -s @ (self.a[1:] * kn) + c @ (self.b * kn)
        elif r == 2:
            val = -c @ (self.a[1:] * kn) - s @ (self.b * kn)
        else:
            val = s @ (self.a[1:] * kn) - c @ (self.b * kn)
        if order == 0:
            val = val + self.a[0]
        return float(val) if np.ndim(val) == 0 else val

    def __call__(self, phi):
        return self.derivative(phi, 0)

    def prime(self, phi):
        return self.derivative(phi, 1)

    def second(self, phi):
        return self.derivative(phi, 2)

    def third(self, phi):
        return self.derivative(phi, 3)

    def bound(self) -> float:
        """Upper bound on max |H| from the coefficient magnitudes."""
        return float(np.sum(np.abs(self.a)) + np.sum(np.abs(self.b)))

    def scaled(self, factor: float) -> "InteractionFunction":
        return InteractionFunction(factor * self.a, factor * self.b)

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, data) -> "InteractionFunction":
        if not isinstance(data, dict) or "a" not in data or "b" not in data:
            raise ConfigError("expected an object with keys 'a' and 'b'", field="$")
        try:
            return cls(np.asarray(data["a"], dtype=float), np.asarray(data["b"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), field="a/b") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "InteractionFunction":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON ({exc})", field=str(path)) from exc
        return cls.from_dict(data)


def eval_H(h: InteractionFunction, phi):
    return h(phi)


def eval_H_prime(h: InteractionFunction, phi):
    return h.prime(phi)


def eval_H_third(h: InteractionFunction, phi):
    return h.third(phi)


def fit_fourier(phi_samples, h_samples, K: int = DEFAULT_K) -> InteractionFunction:
    """Least-squares projection of samples onto the first K Fourier modes."""
    phi = np.asarray(phi_samples, dtype=float).ravel()
    y = np.asarray(h_samples, dtype=float).ravel()
    if phi.size != y.size:
        raise ValueError("phi_samples and h_samples differ in length")
    if phi.size < 2 * K + 1:
        raise InsufficientSamples(f"need at least {2 * K + 1} samples for K={K}, got {phi.size}")
    k = np.arange(1, K + 1)
    arg = np.outer(phi, k)
    design = np.hstack([np.ones((phi.size, 1)), np.cos(arg), np.sin(arg)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return InteractionFunction(coef[: K + 1], coef[K + 1:])


def sample_H(lc: LimitCycle, adj: AdjointSolution, g: CouplingFunction, n_phi: int):
    """H(phi) = (1/2pi) * integral Z(rho) . g(gamma(rho), gamma(rho + phi)) drho
    at ``n_phi`` uniform lags, by the trapezoid rule on the cycle grid."""
    if adj.n_samples != lc.n_samples:
        raise GridMismatch(f"cycle has {lc.n_samples} samples, adjoint {adj.n_samples}")
    N = lc.n_samples
    phis = 2 * np.pi * np.arange(n_phi) / n_phi
    gamma, Z = lc.samples, adj.samples
    values = np.empty(n_phi)
    on_grid = N % n_phi == 0
    for i, phi in enumerate(phis):
        if on_grid:
            other = np.roll(gamma, -(i * N // n_phi), axis=0)
        else:
            other = lc(lc.phases + phi)
        values[i] = np.mean(np.sum(Z * g(gamma, other), axis=1))
    return phis, values


def compute_H(lc: LimitCycle, adj: AdjointSolution, g: CouplingFunction,
              n_phi: int = 256, K: int = DEFAULT_K) -> InteractionFunction:
    if n_phi < 2 * K + 1:
        raise InsufficientSamples(f"n_phi must be at least {2 * K + 1}")
    phis, values = sample_H(lc, adj, g, n_phi)
    return fit_fourier(phis, values, K)
