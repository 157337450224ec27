from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class SystemParams:
    """Decay rates of the atom into the right/left guided modes and elsewhere.

    gamma0 is the total; with the default values it equals 1 so all rates
    and times are already in reduced units.
    """

    gamma_r: float = 0.5
    gamma_l: float = 0.5
    gamma_env: float = 0.0

    def __post_init__(self):
        for name in ("gamma_r", "gamma_l", "gamma_env"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be a nonnegative rate, got {value}", field=name)
        if self.gamma0 <= 0:
            raise ConfigError("total decay rate gamma0 must be positive", field="gamma0")

    @property
    def gamma0(self) -> float:
        return self.gamma_env + self.gamma_r + self.gamma_l

    @property
    def rates(self) -> tuple[float, float]:
        return (self.gamma_r, self.gamma_l)

    @property
    def is_symmetric(self) -> bool:
        return math.isclose(self.gamma_r, self.gamma_l, rel_tol=1e-12, abs_tol=1e-15)

    @property
    def gamma_even(self) -> float:
        """Coupling rate of the even-parity mode, (sqrt(g_r) + sqrt(g_l))^2 / 2."""
        return 0.5 * (math.sqrt(self.gamma_r) + math.sqrt(self.gamma_l)) ** 2

    @classmethod
    def symmetric(cls, gamma0: float = 1.0, gamma_env: float = 0.0) -> "SystemParams":
        guided = 0.5 * (gamma0 - gamma_env)
        return cls(gamma_r=guided, gamma_l=guided, gamma_env=gamma_env)
