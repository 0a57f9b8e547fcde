"""Run configuration: a single nested key/value file (YAML) with defaults for
everything except the seed, plus the figure presets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import yaml

from .beliefs import BeliefEnvironment
from .params import Primitives, symmetric_primitives

PROFILE_IDS = ("no_message", "private_mixed", "peace_trap", "conflict_trap")
CONFLICT_DEFINITIONS = ("canonical", "both_c")


@dataclass(frozen=True)
class ProfileOptions:
    """Profile knobs: the young's response to silence on the peace path,
    whether private-mixed play adopts the strict record responses, and the
    bad old's (unmodeled) messaging rate in the peace trap."""

    q0_at_empty: float = 1.0
    respond_to_record: bool = False
    bad_send_at_empty: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.q0_at_empty <= 1:
            raise ValueError(f"q0_at_empty must lie in [0,1], got {self.q0_at_empty}")
        if not 0 <= self.bad_send_at_empty <= 1:
            raise ValueError(f"bad_send_at_empty must lie in [0,1], got {self.bad_send_at_empty}")


def _default_primitives() -> Primitives:
    return symmetric_primitives(mu=0.6, eps=0.1, k=0.3, g=0.3, ell=0.6)


def _default_env() -> BeliefEnvironment:
    return BeliefEnvironment(mu=0.6, mu_g=0.1, mu_b=0.35, pi_b=0.5)


@dataclass(frozen=True)
class WorldConfig:
    primitives: Primitives = field(default_factory=_default_primitives)
    belief_env: BeliefEnvironment = field(default_factory=_default_env)
    profile: str = "private_mixed"
    profile_options: ProfileOptions = field(default_factory=ProfileOptions)
    s: float = 0.6
    horizon: int = 10_000
    replications: int = 1
    seed: Optional[int] = None
    force_types: Optional[tuple[str, str]] = None
    conflict_definition: str = "canonical"
    initial_h: str = "g"

    def __post_init__(self) -> None:
        if self.profile not in PROFILE_IDS:
            raise ValueError(f"profile must be one of {PROFILE_IDS}, got {self.profile!r}")
        if self.conflict_definition not in CONFLICT_DEFINITIONS:
            raise ValueError(
                f"conflict_definition must be one of {CONFLICT_DEFINITIONS}, "
                f"got {self.conflict_definition!r}"
            )
        if not 0 < self.s <= 1:
            raise ValueError(f"s must lie in (0,1], got {self.s}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.seed is not None and (not isinstance(self.seed, int) or self.seed < 0):
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.initial_h not in ("g", "b"):
            raise ValueError(f"initial_h must be 'g' or 'b', got {self.initial_h!r}")
        if self.force_types is not None:
            if (len(self.force_types) != 2
                    or any(t not in ("normal", "bad") for t in self.force_types)):
                raise ValueError(
                    f"force_types must be a pair of 'normal'/'bad', got {self.force_types!r}"
                )

    def with_(self, **changes) -> "WorldConfig":
        return replace(self, **changes)


def config_to_dict(config: WorldConfig) -> dict:
    d = asdict(config)
    if d["force_types"] is not None:
        d["force_types"] = list(d["force_types"])
    return d


def config_from_dict(data: dict) -> WorldConfig:
    data = dict(data)
    known = {
        "primitives", "belief_env", "profile", "profile_options", "s", "horizon",
        "replications", "seed", "force_types", "conflict_definition", "initial_h",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    if "primitives" in data:
        kwargs["primitives"] = Primitives(**data.pop("primitives"))
    if "belief_env" in data:
        kwargs["belief_env"] = BeliefEnvironment(**data.pop("belief_env"))
    if "profile_options" in data:
        kwargs["profile_options"] = ProfileOptions(**data.pop("profile_options"))
    if "force_types" in data and data["force_types"] is not None:
        data["force_types"] = tuple(data["force_types"])
    kwargs.update(data)
    return WorldConfig(**kwargs)


def serialize_config(config: WorldConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


def parse_config(text: str) -> WorldConfig:
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ValueError("config file must contain a mapping")
    return config_from_dict(data)


def load_config(path) -> WorldConfig:
    with open(path) as fh:
        return parse_config(fh.read())


# Figure presets share (mu_b=0.35, g=0.3, ell=0.6, s=0.6); s=0.6 is the
# illustrative value used for the hazard curves.
def preset(name: str) -> WorldConfig:
    base = WorldConfig()
    if name == "fig1":
        return base
    if name == "fig2":
        return base.with_(horizon=50_000, replications=20,
                          force_types=("normal", "normal"))
    if name == "fig3":
        return base.with_(
            primitives=base.primitives.with_(q_leak=0.2),
            profile="peace_trap",
            horizon=1_000,
            replications=1_000,
            force_types=("normal", "normal"),
        )
    raise ValueError(f"unknown preset {name!r}; available: fig1, fig2, fig3")
