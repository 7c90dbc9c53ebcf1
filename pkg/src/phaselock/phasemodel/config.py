from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import ConfigError
from .stability import RootRegion, Verdict


@dataclass(frozen=True)
class PhaseConfig:
    """Coupling strength, natural frequency and delay of the phase model."""

    epsilon: float
    Omega: float
    tau: float

    def __post_init__(self):
        for name in ("epsilon", "Omega", "tau"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ConfigError("must be finite", field=name)
        if self.epsilon <= 0:
            raise ConfigError("must be positive", field="epsilon")
        if self.Omega <= 0:
            raise ConfigError("must be positive", field="Omega")
        if self.tau < 0:
            raise ConfigError("must be non-negative", field="tau")

    @property
    def eta(self) -> float:
        return self.epsilon * self.Omega * self.tau

    @property
    def shift(self) -> float:
        """Phase shift Omega*tau."""
        return self.Omega * self.tau

    def with_tau(self, tau: float) -> "PhaseConfig":
        return PhaseConfig(self.epsilon, self.Omega, tau)


class Kind(str, enum.Enum):
    IN_PHASE = "InPhase"
    ANTI_PHASE = "AntiPhase"
    OUT_OF_PHASE = "OutOfPhase"


@dataclass(frozen=True)
class PhaseLockedSolution:
    psi: float
    omega: float
    kind: Kind
    a: float
    b: float
    region: RootRegion
    stable: Verdict
    tau: float = float("nan")

    @property
    def is_stable(self) -> bool:
        return self.stable is Verdict.STABLE

    def sort_key(self):
        return (self.psi, self.omega)
