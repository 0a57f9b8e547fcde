"""Bayesian posteriors for the one-sided messaging stage.

Message m=1 is the costly reassurance. A normal old sends it only from the
alarming private state (probability s); a bad old mimics with probability p_b.
Setting p_b = kappa * s pins the post-signal posterior exactly at the receiver
cutoff p_bar for any s > 0.
"""

from __future__ import annotations

from dataclasses import dataclass


class OffPathMessage(Exception):
    """Raised when a posterior is requested for a zero-probability message."""


class InfeasibleMix(Exception):
    """Raised when no valid (s, p_b) implements the cutoff posteriors."""


@dataclass(frozen=True)
class BeliefEnvironment:
    """Exogenous belief inputs: prior mu that the opponent group is bad,
    state-contingent posteriors mu_g < mu_b, and the stationary probability
    pi_b that a normal old holds the alarming state."""

    mu: float
    mu_g: float
    mu_b: float
    pi_b: float

    def __post_init__(self) -> None:
        if not 0 < self.mu < 1:
            raise ValueError(f"mu must lie in (0,1), got {self.mu}")
        if not 0 < self.mu_g < self.mu_b < 1:
            raise ValueError(
                f"posteriors must satisfy 0 < mu_g < mu_b < 1, got mu_g={self.mu_g}, mu_b={self.mu_b}"
            )
        if not 0 < self.pi_b < 1:
            raise ValueError(f"pi_b must lie in (0,1), got {self.pi_b}")

    @property
    def pi_g(self) -> float:
        return 1 - self.pi_b


@dataclass(frozen=True)
class SignalingMix:
    """Messaging mix: normal alarming-state send probability s and bad-type
    mimicking probability p_b."""

    s: float
    p_b: float

    def __post_init__(self) -> None:
        if not 0 <= self.s <= 1:
            raise ValueError(f"s must lie in [0,1], got {self.s}")
        if not 0 <= self.p_b <= 1:
            raise ValueError(f"p_b must lie in [0,1], got {self.p_b}")


@dataclass(frozen=True)
class FeasibleInterval:
    """Feasible range for s; bounds are reported uncapped (s_min may be
    negative, s_max may exceed 1) with capping applied only in the flag."""

    s_min: float
    s_max: float
    feasible: bool


def _posterior_m1(mu: float, pi_b: float, s: float, p_b: float) -> float:
    sent_normal = (1 - mu) * pi_b * s
    sent_bad = mu * p_b
    if sent_normal + sent_bad == 0:
        raise OffPathMessage("m=1 has zero probability (s=0 and p_b=0)")
    return sent_normal / (sent_normal + sent_bad)


def _posterior_m0(mu: float, pi_b: float, s: float, p_b: float) -> float:
    quiet_normal = (1 - mu) * (1 - pi_b + pi_b * (1 - s))
    quiet_bad = mu * (1 - p_b)
    if quiet_normal + quiet_bad == 0:
        raise OffPathMessage("m=0 has zero probability")
    return quiet_normal / (quiet_normal + quiet_bad)


def posterior_given_m1(env: BeliefEnvironment, mix: SignalingMix) -> float:
    """P(sender is normal | m=1) by Bayes' rule."""
    return _posterior_m1(env.mu, env.pi_b, mix.s, mix.p_b)


def posterior_given_m0(env: BeliefEnvironment, mix: SignalingMix) -> float:
    """P(sender is normal | m=0) by Bayes' rule."""
    return _posterior_m0(env.mu, env.pi_b, mix.s, mix.p_b)


def kappa(env: BeliefEnvironment, p_bar: float) -> float:
    """Mimicking coefficient: p_b = kappa * s holds the m=1 posterior at p_bar."""
    if not 0 < p_bar < 1:
        raise ValueError(f"p_bar must lie in (0,1), got {p_bar}")
    return ((1 - p_bar) / p_bar) * ((1 - env.mu) / env.mu) * env.pi_b


def feasible_s_interval(env: BeliefEnvironment, p_bar: float) -> FeasibleInterval:
    """Feasible s interval (s_min, min(1, s_max)] for implementing the cutoff.

    s_min = 1 - (1/pi_b) * [p_bar*mu / ((1-p_bar)*(1-mu)) - pi_g] and
    s_max = 1/kappa (so that p_b = kappa*s stays within [0,1]). Infeasibility
    (empty interval after capping to [0,1]) is a valid result, not an error.
    """
    kap = kappa(env, p_bar)
    s_min = 1 - (1 / env.pi_b) * (
        p_bar * env.mu / ((1 - p_bar) * (1 - env.mu)) - env.pi_g
    )
    s_max = 1 / kap
    feasible = max(s_min, 0.0) < min(s_max, 1.0)
    return FeasibleInterval(s_min=s_min, s_max=s_max, feasible=feasible)


def implement_cutoff(env: BeliefEnvironment, p_bar: float, s: float) -> SignalingMix:
    """Build the mix (s, p_b = kappa*s) that puts the m=1 posterior exactly at
    p_bar and keeps the m=0 posterior weakly below it.

    Requires s strictly inside the feasible interval and s > 0. The m=0 bound
    is re-validated on the realized posterior (the interval formula alone does
    not guarantee it once p_b = kappa*s is substituted into the m=0 pool).
    """
    interval = feasible_s_interval(env, p_bar)
    if not interval.feasible:
        raise InfeasibleMix(
            f"no feasible s: s_min={interval.s_min:.9g}, s_max={interval.s_max:.9g}"
        )
    if not (s > 0 and s > interval.s_min and s <= min(1.0, interval.s_max)):
        raise InfeasibleMix(
            f"s={s:.9g} outside feasible interval "
            f"(max({interval.s_min:.9g}, 0), {min(1.0, interval.s_max):.9g}]"
        )
    p_b = kappa(env, p_bar) * s
    if p_b > 1:
        raise InfeasibleMix(f"p_b = kappa*s = {p_b:.9g} exceeds 1")
    mix = SignalingMix(s=s, p_b=p_b)
    if posterior_given_m0(env, mix) > p_bar + 1e-12:
        raise InfeasibleMix(
            "m=0 posterior exceeds p_bar under p_b = kappa*s "
            f"(posterior={posterior_given_m0(env, mix):.9g}, p_bar={p_bar:.9g})"
        )
    return mix
