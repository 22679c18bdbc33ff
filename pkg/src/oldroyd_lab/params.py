"""Model constants and the derived coefficient set.

The pressure law is ``P(rho) = R rho^gamma`` and the polymer pressure is
``q(eta) = K (L - 1) eta + zeta eta^2``.  ``lam`` is the second viscosity
(``lambda`` in config files, renamed here because of the Python keyword).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysParams:
    mu: float = 1.0
    lam: float = 0.0
    R: float = 1.0
    gamma: float = 2.0
    K: float = 1.0
    L: float = 2.0
    zeta: float = 0.5
    A0: float = 2.0
    lambda1: float = 1.0
    rho_bar: float = 1.0
    eta_bar: float = 1.0
    epsilon: float = 0.0

    def validate(self, dim: int) -> None:
        """Check the admissibility constraints; dim enters the bulk-viscosity bound."""
        if not self.mu > 0:
            raise ValueError("mu > 0 required")
        if dim * self.lam + 2.0 * self.mu < 0:
            raise ValueError("dim*lambda + 2*mu >= 0 required")
        if not self.R > 0:
            raise ValueError("R > 0 required")
        if not self.gamma > 1:
            raise ValueError("gamma > 1 required")
        if not self.K > 0:
            raise ValueError("K > 0 required")
        if self.L < 0 or self.zeta < 0:
            raise ValueError("L >= 0 and zeta >= 0 required")
        if self.zeta + self.L == 0:
            raise ValueError("zeta + L != 0 required")
        if not (self.A0 > 0 and self.lambda1 > 0):
            raise ValueError("A0 > 0 and lambda1 > 0 required")
        if not (self.rho_bar > 0 and self.eta_bar > 0):
            raise ValueError("rho_bar > 0 and eta_bar > 0 required")
        if self.epsilon != 0.0:
            raise ValueError("this model carries no stress diffusion (epsilon = 0)")

    @property
    def p_bar(self) -> float:
        """Equilibrium fluid pressure R rho_bar^gamma."""
        return self.R * self.rho_bar**self.gamma

    def is_normalized(self) -> bool:
        """True when R = rho_bar = eta_bar = 1 (the effective-system gauge)."""
        return self.R == 1.0 and self.rho_bar == 1.0 and self.eta_bar == 1.0


@dataclass(frozen=True)
class DerivedConstants:
    """Coefficients of the rescaled/effective systems."""

    alpha: float    # velocity rescaling, u = v / alpha
    alpha1: float   # acoustic coupling sqrt(R gamma rho_bar^(gamma-1))
    mu1: float      # mu / rho_bar
    mu2: float      # (lambda + mu) / rho_bar
    nu: float       # lambda + 2 mu
    damping: float  # stress relaxation rate A0 / (2 lambda1)

    @classmethod
    def from_params(cls, p: PhysParams) -> "DerivedConstants":
        alpha = math.sqrt(1.0 / (p.R * p.gamma * p.rho_bar ** (p.gamma + 1)))
        alpha1 = math.sqrt(p.R * p.gamma * p.rho_bar ** (p.gamma - 1))
        out = cls(
            alpha=alpha,
            alpha1=alpha1,
            mu1=p.mu / p.rho_bar,
            mu2=(p.lam + p.mu) / p.rho_bar,
            nu=p.lam + 2.0 * p.mu,
            damping=p.A0 / (2.0 * p.lambda1),
        )
        if not out.nu > 0:
            raise ValueError("lambda + 2*mu must be positive")
        return out


def effective_coupling(p: PhysParams) -> float:
    """Linear coupling gamma + 2 zeta + K(L-1) of the effective pressure system."""
    return p.gamma + 2.0 * p.zeta + p.K * (p.L - 1.0)


DEFAULT_PARAMS = PhysParams()
