"""Vector fields, coupling functions and the built-in oscillator models.

Model right-hand sides index the state along the last axis, so they accept a
single state of shape ``(m,)`` or a stack of states of shape ``(N, m)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional

import numpy as np

from ..errors import ConfigError

FD_STEP = 1e-6


def fd_jacobian(rhs: Callable, x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central finite-difference Jacobian of ``rhs`` at a single state."""
    x = np.asarray(x, dtype=float)
    m = x.size
    J = np.empty((m, m))
    for j in range(m):
        step = h * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        J[:, j] = (np.asarray(rhs(xp)) - np.asarray(rhs(xm))) / (2 * step)
    return J


@dataclass(frozen=True)
class VectorField:
    """Autonomous ODE ``x' = rhs(x)`` in the unscaled time of the model."""

    dimension: int
    rhs: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "custom"
    params: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, x):
        return self.rhs(np.asarray(x, dtype=float))

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(x), dtype=float)
        return fd_jacobian(self.rhs, x)


@dataclass(frozen=True)
class CouplingFunction:
    """Coupling ``g(self_state, delayed_other_state)`` of the unscaled system

        x_i' = F(x_i) + eps * g(x_i, x_j(t - tau)).
    """

    dimension: int
    g: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "custom"

    def __call__(self, x_self, x_other):
        return self.g(np.asarray(x_self, dtype=float), np.asarray(x_other, dtype=float))

    def scaled(self, factor: float) -> "CouplingFunction":
        g = self.g
        return CouplingFunction(self.dimension, lambda xs, xo: factor * g(xs, xo),
                                name=f"{factor}*{self.name}")


def diffusive_coupling(dimension: int, component: int = 0) -> CouplingFunction:
    """Difference coupling ``(x_other[c] - x_self[c])`` acting on one component."""

    def g(xs, xo):
        out = np.zeros(np.broadcast_shapes(np.shape(xs), np.shape(xo)))
        out[..., component] = xo[..., component] - xs[..., component]
        return out

    return CouplingFunction(dimension, g, name=f"diffusive_{component}")


def zero_coupling(dimension: int) -> CouplingFunction:
    return CouplingFunction(
        dimension,
        lambda xs, xo: np.zeros(np.broadcast_shapes(np.shape(xs), np.shape(xo))),
        name="zero",
    )


# -- Hopf normal form ---------------------------------------------------------

def hopf_normal_form(mu: float = 1.0, omega: float = 1.0) -> VectorField:
    """Radially isochronous Hopf normal form with a circular cycle of radius sqrt(mu)."""

    def rhs(x):
        r2 = x[..., 0] ** 2 + x[..., 1] ** 2
        return np.stack(
            [mu * x[..., 0] - omega * x[..., 1] - x[..., 0] * r2,
             omega * x[..., 0] + mu * x[..., 1] - x[..., 1] * r2],
            axis=-1,
        )

    def jac(x):
        u, v = x
        return np.array([
            [mu - 3 * u * u - v * v, -omega - 2 * u * v],
            [omega - 2 * u * v, mu - u * u - 3 * v * v],
        ])

    return VectorField(2, rhs, jac, name="hopf", params={"mu": mu, "omega": omega})


# -- Morris-Lecar ---------------------------------------------------------------

MORRIS_LECAR_PARAMS = ("I_app", "g_Ca", "g_K", "g_L", "v_Ca", "v_K", "v_L",
                       "nu1", "nu2", "nu3", "nu4", "phi")


def morris_lecar(params: Mapping[str, float]) -> VectorField:
    """Dimensionless Morris-Lecar model, state ``(v, w)``."""
    missing = [k for k in MORRIS_LECAR_PARAMS if k not in params]
    if missing:
        raise ConfigError(f"missing Morris-Lecar parameters {missing}", field="params")
    p = {k: float(params[k]) for k in MORRIS_LECAR_PARAMS}
    I, gCa, gK, gL = p["I_app"], p["g_Ca"], p["g_K"], p["g_L"]
    vCa, vK, vL = p["v_Ca"], p["v_K"], p["v_L"]
    nu1, nu2, nu3, nu4, phi = p["nu1"], p["nu2"], p["nu3"], p["nu4"], p["phi"]

    def rhs(x):
        v, w = x[..., 0], x[..., 1]
        m_inf = 0.5 * (1 + np.tanh((v - nu1) / nu2))
        w_inf = 0.5 * (1 + np.tanh((v - nu3) / nu4))
        lam = np.cosh((v - nu3) / (2 * nu4))
        dv = I - gCa * m_inf * (v - vCa) - gK * w * (v - vK) - gL * (v - vL)
        dw = phi * lam * (w_inf - w)
        return np.stack([dv, dw], axis=-1)

    def jac(x):
        v, w = x
        m_inf = 0.5 * (1 + np.tanh((v - nu1) / nu2))
        dm = 0.5 / nu2 / np.cosh((v - nu1) / nu2) ** 2
        w_inf = 0.5 * (1 + np.tanh((v - nu3) / nu4))
        dw_inf = 0.5 / nu4 / np.cosh((v - nu3) / nu4) ** 2
        lam = np.cosh((v - nu3) / (2 * nu4))
        dlam = np.sinh((v - nu3) / (2 * nu4)) / (2 * nu4)
        return np.array([
            [-gCa * (dm * (v - vCa) + m_inf) - gK * w - gL, -gK * (v - vK)],
            [phi * (dlam * (w_inf - w) + lam * dw_inf), -phi * lam],
        ])

    return VectorField(2, rhs, jac, name="morris_lecar", params=p)


# -- JSON configuration -----------------------------------------------------------

@dataclass(frozen=True)
class OscillatorConfig:
    model: str
    params: Mapping[str, float]
    coupling: str
    guess: Optional[tuple] = None
    t_transient: float = 500.0
    source: Optional[str] = None
    expected_period: Optional[float] = None

    def vector_field(self) -> VectorField:
        if self.model == "hopf":
            return hopf_normal_form(float(self.params.get("mu", 1.0)),
                                    float(self.params.get("omega", 1.0)))
        return morris_lecar(self.params)

    def coupling_function(self) -> CouplingFunction:
        m = 2
        if self.coupling in ("diffusive_v", "diffusive_x"):
            return diffusive_coupling(m, 0)
        return zero_coupling(m)

    def initial_guess(self) -> np.ndarray:
        if self.guess is not None:
            return np.asarray(self.guess, dtype=float)
        if self.model == "hopf":
            return np.array([1.5, 0.0])
        return np.array([0.0, 0.0])


_MODELS = ("morris_lecar", "hopf")
_COUPLINGS = ("diffusive_v", "diffusive_x", "none")


def parse_oscillator_config(data: Mapping, source: Optional[str] = None) -> OscillatorConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("top level must be a JSON object", field="$")
    model = data.get("model")
    if model not in _MODELS:
        raise ConfigError(f"expected one of {_MODELS}, got {model!r}", field="model")
    params = data.get("params", {})
    if not isinstance(params, Mapping):
        raise ConfigError("must be an object of name: value", field="params")
    clean = {}
    for k, v in params.items():
        if v is None:
            raise ConfigError("value not filled in (template placeholder)", field=f"params.{k}")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"must be a number, got {v!r}", field=f"params.{k}")
        clean[k] = float(v)
    if model == "morris_lecar":
        missing = [k for k in MORRIS_LECAR_PARAMS if k not in clean]
        if missing:
            raise ConfigError(f"missing {missing}", field="params")
    coupling = data.get("coupling", "diffusive_v")
    if coupling not in _COUPLINGS:
        raise ConfigError(f"expected one of {_COUPLINGS}, got {coupling!r}", field="coupling")
    guess = data.get("guess")
    if guess is not None:
        if (not isinstance(guess, (list, tuple)) or len(guess) != 2
                or not all(isinstance(g, (int, float)) for g in guess)):
            raise ConfigError("must be a list of 2 numbers", field="guess")
        guess = tuple(float(g) for g in guess)
    t_transient = data.get("t_transient", 500.0)
    if not isinstance(t_transient, (int, float)) or t_transient < 0:
        raise ConfigError("must be a non-negative number", field="t_transient")
    expected = data.get("expected_period")
    if expected is not None and (isinstance(expected, bool) or not isinstance(expected, (int, float))
                                 or expected <= 0):
        raise ConfigError("must be a positive number", field="expected_period")
    return OscillatorConfig(model, clean, coupling, guess, float(t_transient), source,
                            None if expected is None else float(expected))


def load_oscillator_config(path) -> OscillatorConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc})", field=str(path)) from exc
    return parse_oscillator_config(data, source=str(path))
