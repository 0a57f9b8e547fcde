"""2x2 security-dilemma stage game: payoffs, cutoffs, one-shot best responses.

The game is the canonical stag-hunt normalization

                opp N   opp C
    self N        1      -l
    self C        g       0

with first-strike advantage g in (0,1) and second-strike loss l > 0.
Everything here is a pure function of immutable values; arithmetic stays in
whatever numeric type the caller supplies (Fraction inputs give exact cutoffs).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction


class Action(IntEnum):
    """The two stage-game actions: no-conflict and conflict."""

    N = 0
    C = 1


class Preference(IntEnum):
    PREFER_N = 1
    INDIFFERENT = 0
    PREFER_C = -1


#: Tie rule at the sender cutoff q = q_bar: the weak inequality resolves to N.
TIE_ACTION_AT_CUTOFF = Action.N

#: Absolute tolerance for cutoff comparisons on inexact (float) inputs.
DEFAULT_CUTOFF_TOL = 1e-12

_EXACT_TYPES = (int, Fraction)


@dataclass(frozen=True)
class StagePayoffs:
    """Stage-game parameters (g, l) of the normalized payoff table."""

    g: float
    ell: float

    def __post_init__(self) -> None:
        if not 0 < self.g < 1:
            raise ValueError(f"first-strike advantage g must lie in (0,1), got {self.g}")
        if not self.ell > 0:
            raise ValueError(f"second-strike loss ell must be positive, got {self.ell}")


@dataclass(frozen=True)
class Cutoffs:
    """Belief cutoff p_bar, cooperation cutoff q_bar (= p_bar), and the
    policy threshold k_star = g * q_bar."""

    p_bar: float
    q_bar: float
    k_star: float


def _compare(x, cutoff, tol: float):
    """Three-way compare x against cutoff: exact for exact numeric types,
    absolute tolerance otherwise. Returns -1, 0, or +1."""
    if isinstance(x, _EXACT_TYPES) and isinstance(cutoff, _EXACT_TYPES):
        diff = x - cutoff
        return 0 if diff == 0 else (1 if diff > 0 else -1)
    diff = x - cutoff
    if abs(diff) <= tol:
        return 0
    return 1 if diff > 0 else -1


def stage_payoff(payoffs: StagePayoffs, self_action: Action, opp_action: Action):
    """Normal player's stage payoff for (own action, opponent action)."""
    if self_action == Action.N:
        return 1 if opp_action == Action.N else -payoffs.ell
    return payoffs.g if opp_action == Action.N else 0


def payoff_difference(payoffs: StagePayoffs, p):
    """Expected payoff advantage of N over C against an opponent playing N
    with probability p; equals p*(1 + l - g) - l and vanishes at p_bar."""
    return p * (1 + payoffs.ell - payoffs.g) - payoffs.ell


def compute_cutoffs(payoffs: StagePayoffs) -> Cutoffs:
    """Canonical cutoffs: p_bar = l/(1+l-g), q_bar = p_bar, k_star = g*q_bar."""
    p_bar = payoffs.ell / (1 + payoffs.ell - payoffs.g)
    return Cutoffs(p_bar=p_bar, q_bar=p_bar, k_star=payoffs.g * p_bar)


def receiver_best_response(payoffs: StagePayoffs, p, tol: float = DEFAULT_CUTOFF_TOL) -> Preference:
    """Best response of a normal receiver who believes the opponent plays N
    with probability p: indifferent at p_bar, N above, C below."""
    if not 0 <= p <= 1:
        raise ValueError(f"probability p must lie in [0,1], got {p}")
    side = _compare(p, compute_cutoffs(payoffs).p_bar, tol)
    if side == 0:
        return Preference.INDIFFERENT
    return Preference.PREFER_N if side > 0 else Preference.PREFER_C


def sender_value(payoffs: StagePayoffs, q):
    """Sender's gross value against a normal receiver cooperating with
    probability q: V(q) = max(q*(1+l) - l, q*g).

    The two branches cross at q_bar, where V(q_bar) = k_star.
    """
    if not 0 <= q <= 1:
        raise ValueError(f"probability q must lie in [0,1], got {q}")
    return max(q * (1 + payoffs.ell) - payoffs.ell, q * payoffs.g)


def sender_best_action(
    payoffs: StagePayoffs,
    q,
    tol: float = DEFAULT_CUTOFF_TOL,
    tie: Action = TIE_ACTION_AT_CUTOFF,
) -> Action:
    """Sender's action best response to receiver cooperation probability q:
    N for q >= q_bar (weak inequality), C below."""
    if not 0 <= q <= 1:
        raise ValueError(f"probability q must lie in [0,1], got {q}")
    side = _compare(q, compute_cutoffs(payoffs).q_bar, tol)
    if side == 0:
        return tie
    return Action.N if side > 0 else Action.C
