"""Model primitives shared by the solver and the simulator."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .stage_game import StagePayoffs


@dataclass(frozen=True)
class Primitives:
    """Parameter vector: prior mu, misperception rates, signal cost k, stage
    payoffs (g, ell), leak probability q_leak, and record-forgetting rate rho.

    eps_nc is the chance a true N is perceived as C; eps_cn the chance a true
    C is perceived as N. The symmetric baseline sets both to the same eps.
    """

    mu: float
    eps_nc: float
    eps_cn: float
    k: float
    g: float
    ell: float
    q_leak: float = 0.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.mu < 1:
            raise ValueError(f"prior mu must lie in (0,1), got {self.mu}")
        for name, eps in (("eps_nc", self.eps_nc), ("eps_cn", self.eps_cn)):
            if not 0 <= eps < 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5), got {eps}")
        if not self.k > 0:
            raise ValueError(f"signal cost k must be positive, got {self.k}")
        if not 0 <= self.q_leak <= 1:
            raise ValueError(f"q_leak must lie in [0,1], got {self.q_leak}")
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0,1], got {self.rho}")
        # StagePayoffs enforces g in (0,1), ell > 0
        StagePayoffs(self.g, self.ell)

    @property
    def payoffs(self) -> StagePayoffs:
        return StagePayoffs(self.g, self.ell)

    @property
    def symmetric_eps(self) -> bool:
        return self.eps_nc == self.eps_cn

    def with_(self, **changes) -> "Primitives":
        return replace(self, **changes)


def symmetric_primitives(mu: float, eps: float, k: float, g: float, ell: float,
                         q_leak: float = 0.0, rho: float = 0.0) -> Primitives:
    """Primitives with the symmetric misperception baseline eps_nc = eps_cn = eps."""
    return Primitives(mu=mu, eps_nc=eps, eps_cn=eps, k=k, g=g, ell=ell,
                      q_leak=q_leak, rho=rho)
