"""Cheap-talk benchmarks: babbling impossibility by brute-force enumeration,
and the partial-separation construction under tiny single-crossing costs.

Sender "types" here are the three messaging roles: a normal old in the benign
state (population weight (1-mu)*pi_g), a normal old in the alarming state
((1-mu)*pi_b), and a bad old (mu). All of them value higher receiver
cooperation q: normals get (1-mu_h)*V(q), the bad old (1-mu)*g*q. That shared
monotonicity is what makes costless messages uninformative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .beliefs import BeliefEnvironment
from .equilibrium import ICCheck
from .params import Primitives
from .stage_game import compute_cutoffs, sender_value


@dataclass(frozen=True)
class CheapTalkCosts:
    """Message-D costs with single-crossing: 0 <= c_g < c_b <= c_b_bad."""

    c_g: float
    c_b: float
    c_b_bad: float

    def __post_init__(self) -> None:
        if not (0 <= self.c_g < self.c_b <= self.c_b_bad):
            raise ValueError(
                "costs must satisfy 0 <= c_g < c_b <= c_b_bad, got "
                f"({self.c_g}, {self.c_b}, {self.c_b_bad})"
            )


@dataclass(frozen=True)
class TalkProfile:
    """One-round talk profile: per-role probability of sending D, and the
    receiver's cooperation probability per transcript ('D'/'H' for one round)."""

    send_d: Mapping[str, float]
    q: Mapping[str, float]

    def __post_init__(self) -> None:
        for role in ("benign", "alarming", "bad"):
            if role not in self.send_d:
                raise ValueError(f"send_d missing role {role!r}")
        for v in (*self.send_d.values(), *self.q.values()):
            if not 0 <= v <= 1:
                raise ValueError(f"probability {v} outside [0,1]")


@dataclass(frozen=True)
class BabblingCertificate:
    rounds: int
    grid: int
    tol: float
    n_profiles: int
    n_approx_equilibria: int
    n_counterexamples: int
    max_onpath_coop_gap: float
    certified: bool
    note: str = ""


def _role_values(primitives: Primitives, env: BeliefEnvironment, qs: np.ndarray):
    """Gross value of inducing cooperation q, per sender role."""
    payoffs = primitives.payoffs
    v = np.array([sender_value(payoffs, float(q)) for q in qs])
    return {
        "benign": (1 - env.mu_g) * v,
        "alarming": (1 - env.mu_b) * v,
        "bad": (1 - env.mu) * payoffs.g * qs,
    }


def one_round_slacks(primitives: Primitives, env: BeliefEnvironment,
                     profile: TalkProfile) -> dict[str, float]:
    """Best-response slack of each sender role under a one-round zero-cost
    profile: value of the better message minus the mixed value achieved."""
    qs = np.array([profile.q["D"], profile.q["H"]])
    values = _role_values(primitives, env, qs)
    slacks = {}
    for role, (u_d, u_h) in values.items():
        sigma = profile.send_d[role]
        slacks[role] = float(max(u_d, u_h) - (sigma * u_d + (1 - sigma) * u_h))
    return slacks


def _scan_one_round(primitives: Primitives, env: BeliefEnvironment,
                    grid: int, tol: float) -> BabblingCertificate:
    qs = np.linspace(0.0, 1.0, grid)
    sig = qs
    values = _role_values(primitives, env, qs)

    # per-role slack on (sigma_role, qD, qH); approximate equilibrium needs
    # every role's slack within tol
    ok = {}
    for role, u in values.items():
        u_d = u[None, :, None]
        u_h = u[None, None, :]
        mixed = sig[:, None, None] * u_d + (1 - sig[:, None, None]) * u_h
        ok[role] = np.maximum(u_d, u_h) - mixed <= tol

    approx = (ok["benign"][:, None, None, :, :]
              & ok["alarming"][None, :, None, :, :]
              & ok["bad"][None, None, :, :, :])

    pos = sig > 0
    lt1 = sig < 1
    d_on = (pos[:, None, None] | pos[None, :, None] | pos[None, None, :])
    h_on = (lt1[:, None, None] | lt1[None, :, None] | lt1[None, None, :])
    both_on = (d_on & h_on)[:, :, :, None, None]

    gap = np.abs(qs[:, None] - qs[None, :])
    counter = approx & both_on & (gap[None, None, None, :, :] > tol)
    n_counter = int(counter.sum())

    informative = (approx & both_on).any(axis=(0, 1, 2))
    max_gap = float(gap[informative].max()) if informative.any() else 0.0
    return BabblingCertificate(
        rounds=1, grid=grid, tol=tol,
        n_profiles=grid**5,
        n_approx_equilibria=int(approx.sum()),
        n_counterexamples=n_counter,
        max_onpath_coop_gap=max_gap,
        certified=n_counter == 0,
    )


def _scan_two_round(primitives: Primitives, env: BeliefEnvironment,
                    grid: int, tol: float, note: str = "",
                    rounds: int = 2) -> BabblingCertificate:
    """Two-sided scan: sender message m1 in {D,H}, receiver reply m2 in {r,n},
    then actions. Enumerates sender mixes, the receiver's reply rule, and the
    cooperation map over the four transcripts.

    Approximate equilibria here also require the receiver's reply and action
    stages to be best responses (beliefs by Bayes on-path): with replies in
    the game, sender monotonicity alone does not rule out lottery profiles
    that no rational receiver would sustain. The certified gap is measured
    across the sender's on-path message branches (expected cooperation per
    branch); variation across the receiver's own replies within a branch is
    receiver mixing, not information transmission.
    """
    g = grid
    payoffs = primitives.payoffs
    q_bar = compute_cutoffs(payoffs).p_bar
    qs = np.linspace(0.0, 1.0, g)
    sig = qs
    values = _role_values(primitives, env, qs)
    weights = {
        "benign": (1 - env.mu) * env.pi_g,
        "alarming": (1 - env.mu) * env.pi_b,
        "bad": env.mu,
    }

    # axes: 0 sg, 1 sb, 2 sbad, 3 rD, 4 rH, 5 qDr, 6 qDn, 7 qHr, 8 qHn
    def expand(arr: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
        shape = [1] * 9
        for ax, size in zip(axes, arr.shape):
            shape[ax] = size
        return arr.reshape(shape)

    # branch value of sending m1, as a function of (reply prob, q_r, q_n);
    # the same kernel sits on axes (3,5,6) for D and (4,7,8) for H
    sigma_axis = {"benign": 0, "alarming": 1, "bad": 2}
    sender_ok = {}
    for role, u in values.items():
        kernel = (sig[:, None, None] * u[None, :, None]
                  + (1 - sig[:, None, None]) * u[None, None, :])
        d9 = expand(kernel, (3, 5, 6))
        h9 = expand(kernel, (4, 7, 8))
        s9 = expand(sig, (sigma_axis[role],))
        mixed = s9 * d9 + (1 - s9) * h9
        sender_ok[role] = np.maximum(d9, h9) - mixed <= tol

    # posteriors that the sender is normal, per branch, on (sg, sb, sbad)
    w_n_d = weights["benign"] * sig[:, None, None] + weights["alarming"] * sig[None, :, None]
    w_b_d = weights["bad"] * sig[None, None, :]
    w_n_h = (weights["benign"] * (1 - sig)[:, None, None]
             + weights["alarming"] * (1 - sig)[None, :, None])
    w_b_h = weights["bad"] * (1 - sig)[None, None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        post_d = np.where(w_n_d + w_b_d > 0, w_n_d / np.maximum(w_n_d + w_b_d, 1e-300), 0.0)
        post_h = np.where(w_n_h + w_b_h > 0, w_n_h / np.maximum(w_n_h + w_b_h, 1e-300), 0.0)

    pos = sig > 0
    lt1 = sig < 1
    d_on = pos[:, None, None] | pos[None, :, None] | pos[None, None, :]
    h_on = lt1[:, None, None] | lt1[None, :, None] | lt1[None, None, :]

    sender_plays_n = qs >= q_bar  # normal sender's action at a leaf with coop q

    def leaf_receiver(post: np.ndarray):
        """Receiver action value and action-IC slack at one leaf; dims
        (sg, sb, sbad, q_leaf)."""
        p_n = post[:, :, :, None] * sender_plays_n[None, None, None, :]
        pay_n = p_n * (1 + payoffs.ell) - payoffs.ell
        pay_c = p_n * payoffs.g
        val = qs[None, None, None, :] * pay_n + (1 - qs[None, None, None, :]) * pay_c
        slack = np.maximum(pay_n, pay_c) - val
        return val, slack

    val_d, act_slack_d = leaf_receiver(post_d)
    val_h, act_slack_h = leaf_receiver(post_h)

    def expand4(arr: np.ndarray, q_axis: int) -> np.ndarray:
        return expand(arr, (0, 1, 2, q_axis))

    d_on9 = expand(d_on, (0, 1, 2))
    h_on9 = expand(h_on, (0, 1, 2))
    r_d9 = expand(pos, (3,))        # reply r on-path after D iff rD > 0
    n_d9 = expand(lt1, (3,))
    r_h9 = expand(pos, (4,))
    n_h9 = expand(lt1, (4,))

    recv_ok = (
        (~(d_on9 & r_d9) | expand4(act_slack_d <= tol, 5))
        & (~(d_on9 & n_d9) | expand4(act_slack_d <= tol, 6))
        & (~(h_on9 & r_h9) | expand4(act_slack_h <= tol, 7))
        & (~(h_on9 & n_h9) | expand4(act_slack_h <= tol, 8))
    )

    # receiver reply-stage IC per branch
    rv_d = expand(sig, (3,))
    reply_mix_d = rv_d * expand4(val_d, 5) + (1 - rv_d) * expand4(val_d, 6)
    reply_best_d = np.maximum(expand4(val_d, 5), expand4(val_d, 6))
    rv_h = expand(sig, (4,))
    reply_mix_h = rv_h * expand4(val_h, 7) + (1 - rv_h) * expand4(val_h, 8)
    reply_best_h = np.maximum(expand4(val_h, 7), expand4(val_h, 8))
    recv_ok &= (~d_on9 | (reply_best_d - reply_mix_d <= tol))
    recv_ok &= (~h_on9 | (reply_best_h - reply_mix_h <= tol))

    approx = sender_ok["benign"] & sender_ok["alarming"] & sender_ok["bad"] & recv_ok
    n_approx = int(approx.sum())

    # expected cooperation per sender branch: the same (reply prob, q_r, q_n)
    # kernel on the D axes and the H axes
    eq_branch = (sig[:, None, None] * qs[None, :, None]
                 + (1 - sig)[:, None, None] * qs[None, None, :])
    gap = np.abs(expand(eq_branch, (3, 5, 6)) - expand(eq_branch, (4, 7, 8)))

    both_on = d_on9 & h_on9
    counter = approx & both_on & (gap > tol)
    n_counter = int(counter.sum())
    informative6 = (approx & both_on).any(axis=(0, 1, 2))
    gap6 = np.broadcast_to(gap, approx.shape).max(axis=(0, 1, 2))
    max_gap = float(gap6[informative6].max()) if informative6.any() else 0.0
    return BabblingCertificate(
        rounds=rounds, grid=g, tol=tol,
        n_profiles=g**9,
        n_approx_equilibria=n_approx,
        n_counterexamples=n_counter,
        max_onpath_coop_gap=max_gap,
        certified=n_counter == 0,
        note=note,
    )


def babbling_scan(primitives: Primitives, env: BeliefEnvironment,
                  grid: int = 21, rounds: int = 1,
                  tol: float = 1e-9) -> BabblingCertificate:
    """Certify that no enumerated zero-cost profile is an approximate
    equilibrium with transcript-dependent on-path cooperation.

    rounds=1 is the one-sided protocol (full enumeration over sender mixes
    and (q_D, q_H); grid >= 11). rounds=2 adds the receiver's binary reply.
    rounds=3 reduces exactly to the rounds=2 scan: every sender role's value
    is increasing in q, so the sender's final message maximizes the leaf
    cooperation regardless of role, collapsing each (m1, m2) node to its
    highest-q leaf, which is again a grid value.
    """
    if rounds not in (1, 2, 3):
        raise ValueError(f"rounds must be 1, 2, or 3, got {rounds}")
    if rounds == 1:
        if grid < 11:
            raise ValueError(f"grid must be >= 11 for the one-round scan, got {grid}")
        return _scan_one_round(primitives, env, grid, tol)
    if not 5 <= grid <= 9:
        # the joint enumeration has nine grid dimensions; grid^9 profiles
        raise ValueError(f"multi-round scans need grid in [5, 9], got {grid}")
    note = ""
    if rounds == 3:
        note = ("third round collapsed: all sender roles pick the max-q leaf, "
                "so T=3 profiles reduce to the T=2 scan")
    return _scan_two_round(primitives, env, grid, tol, note=note, rounds=rounds)


def epsilon_cost_equilibrium(
    primitives: Primitives, env: BeliefEnvironment, costs: CheapTalkCosts
) -> tuple[TalkProfile, list[ICCheck]]:
    """Partial-separation profile under single-crossing costs: benign sends D,
    alarming and bad send H, q_H = 0 and q_D = min(q_bar, c_b/((1-mu_b)*g)).

    The report carries the three deviation inequalities: the alarming and bad
    roles must not gain from switching to D, the benign role must weakly
    prefer D.
    """
    payoffs = primitives.payoffs
    q_bar = compute_cutoffs(payoffs).q_bar
    q_d = min(q_bar, costs.c_b / ((1 - env.mu_b) * payoffs.g))
    profile = TalkProfile(
        send_d={"benign": 1.0, "alarming": 0.0, "bad": 0.0},
        q={"D": q_d, "H": 0.0},
    )
    v_d = sender_value(payoffs, q_d)
    checks = [
        ICCheck(
            "alarming_no_gain_from_D",
            costs.c_b - (1 - env.mu_b) * v_d,
            costs.c_b - (1 - env.mu_b) * v_d >= -1e-12,
            f"deviation gain {(1 - env.mu_b) * v_d - costs.c_b:.9g}",
        ),
        ICCheck(
            "bad_no_gain_from_D",
            costs.c_b_bad - (1 - env.mu) * payoffs.g * q_d,
            costs.c_b_bad - (1 - env.mu) * payoffs.g * q_d >= -1e-12,
            f"deviation gain {(1 - env.mu) * payoffs.g * q_d - costs.c_b_bad:.9g}",
        ),
        ICCheck(
            "benign_prefers_D",
            (1 - env.mu_g) * v_d - costs.c_g,
            (1 - env.mu_g) * v_d - costs.c_g >= -1e-12,
            f"net gain from D {(1 - env.mu_g) * v_d - costs.c_g:.9g}",
        ),
    ]
    return profile, checks
