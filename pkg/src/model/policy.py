"""States, actions and stationary switching policies."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple

import numpy as np

from utils.error_utils import ValidationError


class Action(IntEnum):
    OFF = 0
    ON = 1


@dataclass(frozen=True, order=True)
class State:
    """Customer count ``i`` and the on/off status ``delta`` in force since the last jump."""

    i: int
    delta: int

    def __post_init__(self):
        if self.i < 0:
            raise ValidationError("state", f"customer count must be >= 0, got {self.i}")
        if self.delta not in (0, 1):
            raise ValidationError("state", f"status must be 0 or 1, got {self.delta}")

    def __str__(self) -> str:
        return f"({self.i},{self.delta})"


class StationaryPolicy(ABC):
    """Deterministic stationary policy; every policy is all-on from ``cutoff`` upwards."""

    kind: str = "policy"

    @abstractmethod
    def decide(self, i: int, delta: int) -> int:
        """Action (0 or 1) in state (i, delta)."""

    @property
    @abstractmethod
    def cutoff(self) -> int:
        """Smallest level from which action 1 is taken in both statuses."""

    @abstractmethod
    def regeneration_state(self) -> State:
        """A state the controlled chain returns to infinitely often."""

    @abstractmethod
    def label(self) -> str:
        """Text form accepted by ``parse_policy``."""

    def action_table(self, levels: int) -> np.ndarray:
        """Actions for levels 0..levels-1 as an int8 array indexed [i, delta]."""
        table = np.ones((levels, 2), dtype=np.int8)
        for i in range(min(levels, self.cutoff)):
            table[i, 0] = self.decide(i, 0)
            table[i, 1] = self.decide(i, 1)
        return table

    def __call__(self, s: State) -> Action:
        return Action(self.decide(s.i, s.delta))

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class MNPolicy(StationaryPolicy):
    """Switch a running system off at M customers, an idle one on at N > M."""

    M: int
    N: int
    kind = "mn"

    def __post_init__(self):
        if self.M < 0:
            raise ValidationError("policy", f"M must be >= 0, got {self.M}")
        if self.N <= self.M:
            raise ValidationError("policy", f"N must exceed M, got M={self.M}, N={self.N}")

    def decide(self, i: int, delta: int) -> int:
        return int(i > self.M) if delta else int(i >= self.N)

    @property
    def cutoff(self) -> int:
        return self.N

    def action_table(self, levels: int) -> np.ndarray:
        levels_idx = np.arange(levels)
        return np.stack([levels_idx >= self.N, levels_idx > self.M], axis=1).astype(np.int8)

    def regeneration_state(self) -> State:
        return State(self.N, 0)

    def label(self) -> str:
        return f"mn:{self.M},{self.N}"


@dataclass(frozen=True)
class FullServicePolicy(StationaryPolicy):
    """Never switch a running system off; switch an idle one on at n customers."""

    n: int
    kind = "full"

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("policy", f"n must be >= 0, got {self.n}")

    def decide(self, i: int, delta: int) -> int:
        return 1 if delta else int(i >= self.n)

    @property
    def cutoff(self) -> int:
        return self.n

    def regeneration_state(self) -> State:
        return State(0, 1)

    def label(self) -> str:
        return f"full:{self.n}"


@dataclass(frozen=True)
class TablePolicy(StationaryPolicy):
    """
    Explicit actions below ``cutoff_level`` and action 1 everywhere above.

    ``actions[i]`` is the pair (action at (i,0), action at (i,1)).
    """

    actions: Tuple[Tuple[int, int], ...]
    cutoff_level: int
    kind = "table"

    def __post_init__(self):
        if self.cutoff_level < 0:
            raise ValidationError("policy", f"cutoff must be >= 0, got {self.cutoff_level}")
        if len(self.actions) < self.cutoff_level:
            raise ValidationError("policy", "action table shorter than its cutoff")
        for row in self.actions:
            if len(row) != 2 or any(a not in (0, 1) for a in row):
                raise ValidationError("policy", f"bad action row {row!r}")

    def decide(self, i: int, delta: int) -> int:
        if i >= self.cutoff_level:
            return 1
        return self.actions[i][delta]

    @property
    def cutoff(self) -> int:
        return self.cutoff_level

    def regeneration_state(self) -> State:
        """
        First switch-on level above the highest switch-off level, entered while idle.

        A running system drifts down to its highest switch-off level, so that level
        followed by the climb to the next switch-on level is recurrent. Tables that
        never switch off regenerate at (0,1).
        """
        off_levels = [i for i in range(self.cutoff_level) if self.actions[i][1] == 0]
        if not off_levels:
            return State(0, 1)
        n = max(off_levels) + 1
        while not self.decide(n, 0):
            n += 1
        return State(n, 0)

    def label(self) -> str:
        return f"table:{self.cutoff_level}"


def policy_action(pol: StationaryPolicy, s: State) -> Action:
    """
    Action chosen by a stationary policy.

    Args:
        pol: the policy
        s: current state

    Returns:
        Action.ON or Action.OFF
    """
    return pol(s)


def parse_policy(text: str) -> StationaryPolicy:
    """
    Parse ``mn:M,N``, ``full:n`` or ``full`` (n = 0).

    Raises:
        ValidationError: on malformed text or a policy that violates its own invariants
    """
    raw = (text or "").strip().lower()
    kind, _, args = raw.partition(":")
    try:
        if kind == "mn":
            m_text, n_text = args.split(",")
            return MNPolicy(int(m_text), int(n_text))
        if kind == "full":
            return FullServicePolicy(int(args) if args else 0)
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError("policy", f"malformed policy {text!r}") from None
    raise ValidationError("policy", f"unknown policy {text!r}; expected mn:M,N, full:n or full")
