"""Overlapping-generations simulation of the signaling security dilemma.

Each period an old agent from one group meets a young agent from the other
(roles alternate by period parity). The old may send a costly private message,
nature draws a leak, both act, the young carries a noisy perception of the
old's action into their own old age, and the public record updates when a
costly message leaked.

Strategy profiles are behavioral tables keyed by the public record; they are
simulated as given, whether or not they are sequentially rational at the
configured parameters (equilibrium checks live in `equilibrium`).

RNG contract: one master seed; replication r uses the stream seeded by
SeedSequence([seed, r]). A run consumes two uniforms for the group-type draws
and then exactly five uniforms per period, in fixed order: message mix, leak,
receiver mix, perception, forgetting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Optional

import numpy as np

from .config import WorldConfig
from .equilibrium import MixedSignalingEquilibrium, build_equilibrium
from .params import Primitives
from .stage_game import Action


class PublicRecord(IntEnum):
    EMPTY = 0
    SUCCESS = 1
    FAILURE = 2


class GroupType(IntEnum):
    NORMAL = 0
    BAD = 1


class PrivateState(IntEnum):
    BENIGN = 0    # h = g: perceived no-conflict last period
    ALARMING = 1  # h = b: perceived conflict


#: Fixed column order of the trace export.
TRACE_COLUMNS = (
    "t", "record_before", "h_old", "type_old", "type_young", "message",
    "leaked", "action_old", "action_young", "perception", "record_after",
    "payoff_old", "payoff_young", "cost_paid",
)

_RECORD_TOKENS = {PublicRecord.EMPTY: "-", PublicRecord.SUCCESS: "S", PublicRecord.FAILURE: "F"}
_H_TOKENS = {PrivateState.BENIGN: "g", PrivateState.ALARMING: "b"}
_TYPE_TOKENS = {GroupType.NORMAL: "n", GroupType.BAD: "b"}
_ACTION_TOKENS = {Action.N: "N", Action.C: "C"}


@dataclass(frozen=True)
class RecordBehavior:
    """Behavior at one public-record value.

    send_*: probability of sending m=1 for a normal old in each private state
    and for a bad old. action_*: the normal old's action after (m=0, m=1).
    coop: the normal young's probability of playing N after (m=0, m=1).
    Bad types always play C regardless of these tables.
    """

    send_benign: float
    send_alarming: float
    send_bad: float
    action_benign: tuple[Action, Action]
    action_alarming: tuple[Action, Action]
    coop: tuple[float, float]


PEACE_BEHAVIOR = RecordBehavior(
    send_benign=0.0, send_alarming=0.0, send_bad=0.0,
    action_benign=(Action.N, Action.N), action_alarming=(Action.N, Action.N),
    coop=(1.0, 1.0),
)

CONFLICT_BEHAVIOR = RecordBehavior(
    send_benign=0.0, send_alarming=0.0, send_bad=0.0,
    action_benign=(Action.C, Action.C), action_alarming=(Action.C, Action.C),
    coop=(0.0, 0.0),
)


@dataclass(frozen=True)
class StrategyProfile:
    """Record-contingent behavioral profile for the whole population."""

    profile_id: str
    at_empty: RecordBehavior
    at_success: RecordBehavior
    at_failure: RecordBehavior
    equilibrium: Optional[MixedSignalingEquilibrium] = None

    def behavior(self, record: PublicRecord) -> RecordBehavior:
        if record == PublicRecord.EMPTY:
            return self.at_empty
        if record == PublicRecord.SUCCESS:
            return self.at_success
        return self.at_failure


def no_message_profile() -> StrategyProfile:
    """Benchmark without a message stage: the normal old plays N from the
    benign state and C from the alarming one; the young plays N."""
    b = RecordBehavior(
        send_benign=0.0, send_alarming=0.0, send_bad=0.0,
        action_benign=(Action.N, Action.N), action_alarming=(Action.C, Action.C),
        coop=(1.0, 1.0),
    )
    return StrategyProfile("no_message", b, b, b)


def private_mixed_profile(
    eq: MixedSignalingEquilibrium,
    q0_at_empty: float = 1.0,
    respond_to_record: bool = False,
) -> StrategyProfile:
    """Mixed-signaling play: the alarming old sends m=1 with probability s and
    plays the regime action after it (C low-cost, N high-cost); the benign old
    stays quiet and plays N; the bad old mimics with p_b and plays C; the
    young plays N with probability q1 after m=1.

    q0_at_empty is the young's response to silence on the peace path. The
    equilibrium object carries q0=0, but the dynamic renewal claims (onset
    only from alarming states, spells ending at the first C->N misperception)
    require benign-state periods to realize (N,N), so silence is met with
    cooperation by default. With respond_to_record the profile adopts the
    strict responses at leaked records (both play C at Failure, both play N
    at Success); otherwise it ignores the record entirely.
    """
    a1 = eq.sender_action_after_m1
    at_empty = RecordBehavior(
        send_benign=0.0, send_alarming=eq.s, send_bad=eq.p_b,
        action_benign=(Action.N, a1), action_alarming=(Action.C, a1),
        coop=(q0_at_empty, eq.q1),
    )
    if respond_to_record:
        return StrategyProfile("private_mixed", at_empty, PEACE_BEHAVIOR,
                               CONFLICT_BEHAVIOR, eq)
    return StrategyProfile("private_mixed", at_empty, at_empty, at_empty, eq)


def peace_trap_profile(bad_send_at_empty: float = 0.0) -> StrategyProfile:
    """Peace-trap play: with no record every normal old sends and plays N and
    the young cooperates after a message (q1=1, q0=0); after a leaked success
    messages stop and both sides play N. Bad olds do not send by default."""
    at_empty = RecordBehavior(
        send_benign=1.0, send_alarming=1.0, send_bad=bad_send_at_empty,
        action_benign=(Action.N, Action.N), action_alarming=(Action.N, Action.N),
        coop=(0.0, 1.0),
    )
    return StrategyProfile("peace_trap", at_empty, PEACE_BEHAVIOR, CONFLICT_BEHAVIOR)


def conflict_trap_profile(
    eq: MixedSignalingEquilibrium, q0_at_empty: float = 1.0
) -> StrategyProfile:
    """Conflict-trap play: the mixed-signaling construction while no record
    exists; after a leaked failure messages stop, the young never cooperates,
    and the old best-responds with C."""
    base = private_mixed_profile(eq, q0_at_empty=q0_at_empty).at_empty
    return StrategyProfile("conflict_trap", base, PEACE_BEHAVIOR, CONFLICT_BEHAVIOR, eq)


def profile_from_config(config: WorldConfig) -> StrategyProfile:
    """Resolve the configured profile id and options, building the embedded
    equilibrium where the profile requires one."""
    opts = config.profile_options
    if config.profile == "no_message":
        return no_message_profile()
    if config.profile == "peace_trap":
        return peace_trap_profile(bad_send_at_empty=opts.bad_send_at_empty)
    eq = build_equilibrium(config.primitives, config.belief_env, config.s)
    if config.profile == "private_mixed":
        return private_mixed_profile(eq, q0_at_empty=opts.q0_at_empty,
                                     respond_to_record=opts.respond_to_record)
    if config.profile == "conflict_trap":
        return conflict_trap_profile(eq, q0_at_empty=opts.q0_at_empty)
    raise ValueError(f"unknown profile id: {config.profile!r}")


# ---------------------------------------------------------------------------
# Single-period protocol


@dataclass
class WorldState:
    """State of the chain between periods. Group types are persistent; roles
    alternate deterministically (group A is old on even periods)."""

    period: int
    group_types: tuple[GroupType, GroupType]
    old_group: int
    old_h: PrivateState
    record: PublicRecord
    rng: np.random.Generator

    @property
    def young_group(self) -> int:
        return 1 - self.old_group


@dataclass(frozen=True)
class PeriodOutcome:
    period: int
    record_before: PublicRecord
    h_old: PrivateState
    type_old: GroupType
    type_young: GroupType
    message: int
    leaked: bool
    action_old: Action
    action_young: Action
    young_perception: Action
    record_after: PublicRecord
    payoff_old: float
    payoff_young: float
    cost_paid: float


def step(state: WorldState, profile: StrategyProfile,
         primitives: Primitives) -> tuple[WorldState, PeriodOutcome]:
    """Advance one period: message, leak, actions, payoffs, perception,
    record update (with end-of-period forgetting), role swap."""
    u = state.rng.random(5)
    beh = profile.behavior(state.record)
    type_old = state.group_types[state.old_group]
    type_young = state.group_types[state.young_group]

    if type_old == GroupType.BAD:
        send_p = beh.send_bad
    elif state.old_h == PrivateState.ALARMING:
        send_p = beh.send_alarming
    else:
        send_p = beh.send_benign
    message = 1 if u[0] < send_p else 0
    leaked = bool(u[1] < primitives.q_leak)

    if type_old == GroupType.BAD:
        action_old = Action.C
    else:
        pair = beh.action_alarming if state.old_h == PrivateState.ALARMING else beh.action_benign
        action_old = pair[message]
    if type_young == GroupType.BAD:
        action_young = Action.C
    else:
        action_young = Action.N if u[2] < beh.coop[message] else Action.C

    if action_old == Action.C:
        perception = Action.N if u[3] < primitives.eps_cn else Action.C
    else:
        perception = Action.C if u[3] < primitives.eps_nc else Action.N

    if leaked and message == 1:
        record_after = (PublicRecord.SUCCESS
                        if action_old == Action.N and action_young == Action.N
                        else PublicRecord.FAILURE)
    elif state.record != PublicRecord.EMPTY and u[4] < primitives.rho:
        # forgetting skips periods that just formed a record, so every record
        # is observed for at least one period
        record_after = PublicRecord.EMPTY
    else:
        record_after = state.record

    table = ((1.0, -primitives.ell), (primitives.g, 0.0))
    outcome = PeriodOutcome(
        period=state.period,
        record_before=state.record,
        h_old=state.old_h,
        type_old=type_old,
        type_young=type_young,
        message=message,
        leaked=leaked,
        action_old=action_old,
        action_young=action_young,
        young_perception=perception,
        record_after=record_after,
        payoff_old=table[action_old][action_young],
        payoff_young=table[action_young][action_old],
        cost_paid=primitives.k if message else 0.0,
    )
    next_state = WorldState(
        period=state.period + 1,
        group_types=state.group_types,
        old_group=state.young_group,
        old_h=PrivateState.ALARMING if perception == Action.C else PrivateState.BENIGN,
        record=record_after,
        rng=state.rng,
    )
    return next_state, outcome


def initial_state(config: WorldConfig, replication: int = 0) -> WorldState:
    """Seeded initial state for one replication: draws (or forces) the two
    persistent group types, then positions group A as the first old."""
    if config.seed is None:
        raise ValueError("seed is required for simulation")
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, replication]))
    u = rng.random(2)  # consumed even when types are forced, for stream stability
    if config.force_types is not None:
        types = tuple(GroupType.BAD if t == "bad" else GroupType.NORMAL
                      for t in config.force_types)
    else:
        types = tuple(GroupType.BAD if ui < config.primitives.mu else GroupType.NORMAL
                      for ui in u)
    h0 = PrivateState.ALARMING if config.initial_h == "b" else PrivateState.BENIGN
    return WorldState(period=0, group_types=types, old_group=0, old_h=h0,
                      record=PublicRecord.EMPTY, rng=rng)


# ---------------------------------------------------------------------------
# Whole-run simulation over array traces


@dataclass
class Trace:
    """Columns of one run, encoded as small integer arrays (records 0/1/2,
    private states 0=g/1=b, types 0=normal/1=bad, actions/perceptions 0=N/1=C).
    Payoff and cost columns are derived on demand."""

    horizon: int
    record_before: np.ndarray
    h_old: np.ndarray
    type_old: np.ndarray
    type_young: np.ndarray
    message: np.ndarray
    leaked: np.ndarray
    action_old: np.ndarray
    action_young: np.ndarray
    perception: np.ndarray
    record_after: np.ndarray
    meta: dict = field(default_factory=dict)

    def payoff_columns(self, primitives: Primitives) -> tuple[np.ndarray, np.ndarray]:
        table = np.array([[1.0, -primitives.ell], [primitives.g, 0.0]])
        return (table[self.action_old, self.action_young],
                table[self.action_young, self.action_old])

    def cost_column(self, primitives: Primitives) -> np.ndarray:
        return primitives.k * self.message.astype(np.float64)

    def window(self, start: int, stop: int) -> "Trace":
        """Sub-trace over periods [start, stop); period indices stay absolute
        via the meta offset."""
        meta = dict(self.meta)
        meta["t_offset"] = meta.get("t_offset", 0) + start
        return Trace(
            horizon=stop - start,
            record_before=self.record_before[start:stop],
            h_old=self.h_old[start:stop],
            type_old=self.type_old[start:stop],
            type_young=self.type_young[start:stop],
            message=self.message[start:stop],
            leaked=self.leaked[start:stop],
            action_old=self.action_old[start:stop],
            action_young=self.action_young[start:stop],
            perception=self.perception[start:stop],
            record_after=self.record_after[start:stop],
            meta=meta,
        )


def _record_is_absorbing(profile: StrategyProfile, record: int,
                         types: tuple[int, int], primitives: Primitives) -> bool:
    """True when, at this record, no message can ever be sent by the present
    types, the record cannot decay, and the normal old's action no longer
    depends on the private state. From such a state the remaining periods are
    an i.i.d. sequence and can be generated vectorized, exactly."""
    if primitives.rho > 0:
        return False
    if types[0] != types[1]:
        return False
    beh = profile.behavior(PublicRecord(record))
    if types[0] == GroupType.BAD:
        return beh.send_bad == 0.0
    return (beh.send_benign == 0.0 and beh.send_alarming == 0.0
            and beh.action_benign[0] == beh.action_alarming[0])


def run(config: WorldConfig, replication: int = 0,
        profile: Optional[StrategyProfile] = None) -> Trace:
    """Simulate one replication; deterministic given (config, replication).

    Identical, period for period, to folding `step` from `initial_state`
    (the absorbing-record fast path consumes the same uniform stream and is
    exact, not approximate).
    """
    if config.horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {config.horizon}")
    if profile is None:
        profile = profile_from_config(config)
    prim = config.primitives
    state = initial_state(config, replication)
    horizon = config.horizon
    draws = state.rng.random((horizon, 5))

    type_a, type_b = (int(t) for t in state.group_types)
    behaviors = [profile.at_empty, profile.at_success, profile.at_failure]
    send_n = [(b.send_benign, b.send_alarming) for b in behaviors]
    send_bad = [b.send_bad for b in behaviors]
    # normal old action indexed by h*2 + m
    act_n = [(int(b.action_benign[0]), int(b.action_benign[1]),
              int(b.action_alarming[0]), int(b.action_alarming[1])) for b in behaviors]
    coop = [(b.coop[0], b.coop[1]) for b in behaviors]

    col_record = bytearray(horizon)
    col_h = bytearray(horizon)
    col_msg = bytearray(horizon)
    col_leak = bytearray(horizon)
    col_aold = bytearray(horizon)
    col_ayoung = bytearray(horizon)
    col_perc = bytearray(horizon)

    q_leak = prim.q_leak
    rho = prim.rho
    eps_nc = prim.eps_nc
    eps_cn = prim.eps_cn

    record = int(PublicRecord.EMPTY)
    h = int(state.old_h)
    told, tyoung = type_a, type_b
    types = (type_a, type_b)
    checked_record = -1
    absorbed = False

    t = 0
    chunk = 1 << 16
    while t < horizon and not absorbed:
        hi = min(t + chunk, horizon)
        rows = draws[t:hi].tolist()
        for u in rows:
            if record != checked_record:
                checked_record = record
                if _record_is_absorbing(profile, record, types, prim):
                    absorbed = True
                    break
            if told:  # bad old
                message = 1 if u[0] < send_bad[record] else 0
                action_old = 1
            else:
                message = 1 if u[0] < send_n[record][h] else 0
                action_old = act_n[record][h * 2 + message]
            leaked = 1 if u[1] < q_leak else 0
            if tyoung:
                action_young = 1
            else:
                action_young = 0 if u[2] < coop[record][message] else 1
            if action_old:
                perception = 0 if u[3] < eps_cn else 1
            else:
                perception = 1 if u[3] < eps_nc else 0

            col_record[t] = record
            col_h[t] = h
            col_msg[t] = message
            col_leak[t] = leaked
            col_aold[t] = action_old
            col_ayoung[t] = action_young
            col_perc[t] = perception

            if leaked and message:
                record = 1 if (action_old == 0 and action_young == 0) else 2
            elif record and u[4] < rho:
                record = 0
            h = perception
            told, tyoung = tyoung, told
            t += 1

    record_before = np.frombuffer(bytes(col_record), dtype=np.uint8).copy()
    h_arr = np.frombuffer(bytes(col_h), dtype=np.uint8).copy()
    msg_arr = np.frombuffer(bytes(col_msg), dtype=np.uint8).copy()
    leak_arr = np.frombuffer(bytes(col_leak), dtype=np.uint8).copy()
    aold_arr = np.frombuffer(bytes(col_aold), dtype=np.uint8).copy()
    ayoung_arr = np.frombuffer(bytes(col_ayoung), dtype=np.uint8).copy()
    perc_arr = np.frombuffer(bytes(col_perc), dtype=np.uint8).copy()

    if absorbed and t < horizon:
        # exact vectorized continuation of the absorbing block
        n_tail = horizon - t
        beh = behaviors[record]
        record_before[t:] = record
        leak_arr[t:] = draws[t:, 1] < q_leak
        if types[0] == GroupType.BAD:
            a0 = 1
        else:
            a0 = int(beh.action_benign[0])
        aold_arr[t:] = a0
        if types[0] == GroupType.BAD:
            ayoung_arr[t:] = 1
        else:
            c0 = beh.coop[0]
            if c0 >= 1.0:
                ayoung_arr[t:] = 0
            elif c0 <= 0.0:
                ayoung_arr[t:] = 1
            else:
                ayoung_arr[t:] = draws[t:, 2] >= c0
        if a0 == 1:
            perc_arr[t:] = draws[t:, 3] >= eps_cn
        else:
            perc_arr[t:] = draws[t:, 3] < eps_nc
        h_arr[t] = h
        if n_tail > 1:
            h_arr[t + 1:] = perc_arr[t:-1]
        final_record = record
    else:
        final_record = record

    record_after = np.empty(horizon, dtype=np.uint8)
    record_after[:-1] = record_before[1:]
    record_after[-1] = final_record

    parity = np.arange(horizon) % 2
    type_old_arr = np.where(parity == 0, type_a, type_b).astype(np.uint8)
    type_young_arr = np.where(parity == 0, type_b, type_a).astype(np.uint8)

    return Trace(
        horizon=horizon,
        record_before=record_before,
        h_old=h_arr,
        type_old=type_old_arr,
        type_young=type_young_arr,
        message=msg_arr,
        leaked=leak_arr,
        action_old=aold_arr,
        action_young=ayoung_arr,
        perception=perc_arr,
        record_after=record_after,
        meta={
            "profile_id": profile.profile_id,
            "seed": config.seed,
            "replication": replication,
            "group_types": ("bad" if type_a else "normal", "bad" if type_b else "normal"),
        },
    )


def iter_replications(config: WorldConfig,
                      profile: Optional[StrategyProfile] = None) -> Iterator[Trace]:
    """Yield the configured number of independent replication traces."""
    if profile is None:
        profile = profile_from_config(config)
    for rep in range(config.replications):
        yield run(config, replication=rep, profile=profile)


@dataclass(frozen=True)
class AbsorptionResult:
    state: Optional[PublicRecord]
    time: int
    censored: bool
    stable: bool


def absorption_time(trace: Trace) -> AbsorptionResult:
    """First period whose record update leaves Empty, counted 1-based (so a
    record formed in the first period gives time 1). Censored when the horizon
    ends with the record still Empty; `stable` reports whether the record
    never changed again within the trace."""
    if trace.horizon < 1:
        raise ValueError("trace is empty")
    nonempty = np.flatnonzero(trace.record_after != int(PublicRecord.EMPTY))
    if len(nonempty) == 0:
        return AbsorptionResult(state=None, time=trace.horizon, censored=True, stable=True)
    t = int(nonempty[0])
    entered = PublicRecord(int(trace.record_after[t]))
    stable = bool(np.all(trace.record_after[t:] == int(entered)))
    return AbsorptionResult(state=entered, time=t + 1, censored=False, stable=stable)


def write_trace_csv(trace: Trace, primitives: Primitives, path) -> None:
    """Write the trace in the fixed delimited layout (one row per period)."""
    payoff_old, payoff_young = trace.payoff_columns(primitives)
    cost = trace.cost_column(primitives)
    t0 = trace.meta.get("t_offset", 0)
    rec = np.array(["-", "S", "F"])
    hs = np.array(["g", "b"])
    ty = np.array(["n", "b"])
    ac = np.array(["N", "C"])
    with open(path, "w") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for i in range(trace.horizon):
            fh.write(
                f"{t0 + i},{rec[trace.record_before[i]]},{hs[trace.h_old[i]]},"
                f"{ty[trace.type_old[i]]},{ty[trace.type_young[i]]},"
                f"{trace.message[i]},{trace.leaked[i]},"
                f"{ac[trace.action_old[i]]},{ac[trace.action_young[i]]},"
                f"{ac[trace.perception[i]]},{rec[trace.record_after[i]]},"
                f"{payoff_old[i]:.9g},{payoff_young[i]:.9g},{cost[i]:.9g}\n"
            )
