"""Exact domain model for finite-horizon bounded-concurrency stochastic games.

States, actions and agents are referred to by dense integer indices
everywhere inside the package; the string identifiers from input files are
kept only for display.  All input probabilities are dyadic rationals that
share one bit length per instance, stored as bare integer numerators over
the implicit denominator ``2**lbits``.  Derived quantities are computed
with :class:`fractions.Fraction`, so every number in the package is exact;
there is no floating point anywhere on a verification path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

Theta = tuple[int, ...]  # one action index per active agent, agent-index order


class CapExceeded(Exception):
    """Raised when an explicit construction would exceed the state budget."""

    def __init__(self, cap: int, what: str = "explored states"):
        super().__init__(f"{what} would exceed cap={cap}")
        self.cap = cap


@dataclass(frozen=True)
class DyadicProb:
    """A probability ``numerator / 2**lbits``.

    ``numerator == 2**lbits`` is allowed and encodes exactly 1, so that
    deterministic distributions are representable on the dyadic grid.
    """

    numerator: int
    lbits: int

    def __post_init__(self) -> None:
        if self.lbits < 1:
            raise ValueError(f"lbits must be positive, got {self.lbits}")
        if not 0 <= self.numerator <= (1 << self.lbits):
            raise ValueError(
                f"numerator {self.numerator} outside [0, 2^{self.lbits}]"
            )


def dyadic_to_rat(p: DyadicProb) -> Fraction:
    """Exact value of a dyadic probability as a reduced rational."""
    return Fraction(p.numerator, 1 << p.lbits)


@dataclass
class GameSystem:
    """A bounded-concurrency stochastic game over dyadic probabilities.

    Fields:
        states: state identifiers; declaration order is the canonical order.
        init: index of the initial state.
        actions: per-agent action identifier tuples (agents are 0-based
            internally, 1-based in files and reports).
        playing: per-state sorted tuple of active agent indices.
        trans: ``(state, theta) -> {successor: numerator}`` where ``theta``
            holds one action index per active agent in agent-index order and
            numerators are over ``2**lbits``.  Zero entries are not stored.
        lbits: shared bit length of all probabilities in the instance.
        goals: per-agent reachability target sets.
        horizon: exact number of states in a play (arbitrary precision).
        bound: declared concurrency bound b.
    """

    states: tuple[str, ...]
    init: int
    actions: tuple[tuple[str, ...], ...]
    playing: tuple[tuple[int, ...], ...]
    trans: dict[tuple[int, Theta], dict[int, int]]
    lbits: int
    goals: tuple[frozenset[int], ...]
    horizon: int
    bound: int

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_agents(self) -> int:
        return len(self.actions)

    @property
    def one(self) -> int:
        """The numerator encoding probability 1."""
        return 1 << self.lbits

    def theta_space(self, v: int) -> Iterator[Theta]:
        """All joint actions of the agents active at ``v``, lexicographic."""
        ranges = [range(len(self.actions[i])) for i in self.playing[v]]
        return itertools.product(*ranges)

    def row(self, v: int, theta: Theta) -> dict[int, int]:
        return self.trans[(v, theta)]

    def positive_targets(self, v: int) -> tuple[int, ...]:
        """Successors of ``v`` reachable under some joint action."""
        seen: set[int] = set()
        for theta in self.theta_space(v):
            row = self.trans.get((v, theta))
            if row:
                seen.update(t for t, num in row.items() if num > 0)
        return tuple(sorted(seen))

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None


def validate_game(g: GameSystem) -> list[str]:
    """Check every structural invariant; returns violations, empty if valid.

    Violations are data, not exceptions: callers decide whether a broken
    instance is fatal.
    """
    problems: list[str] = []
    k = g.num_agents
    if g.bound < 1:
        problems.append(f"bound {g.bound} < 1")
    if g.bound > k:
        problems.append(f"bound {g.bound} exceeds agent count {k}")
    if g.horizon < 1:
        problems.append(f"horizon {g.horizon} < 1")
    if g.lbits < 1:
        problems.append(f"lbits {g.lbits} < 1")
    if not 0 <= g.init < g.num_states:
        problems.append(f"initial state index {g.init} out of range")
    if len(g.playing) != g.num_states:
        problems.append("playing function not defined on every state")
    for i, acts in enumerate(g.actions):
        if not acts:
            problems.append(f"agent {i + 1}: empty action set")
    for v, active in enumerate(g.playing):
        if len(active) > g.bound:
            problems.append(
                f"state {g.states[v]}: {len(active)} active agents "
                f"exceeds bound {g.bound}"
            )
        if any(not 0 <= i < k for i in active):
            problems.append(f"state {g.states[v]}: unknown agent in playing set")
        for theta in g.theta_space(v):
            row = g.trans.get((v, theta))
            if row is None:
                problems.append(
                    f"state {g.states[v]}: missing transition row for "
                    f"action tuple {theta}"
                )
                continue
            total = 0
            for target, num in row.items():
                if not 0 <= target < g.num_states:
                    problems.append(
                        f"state {g.states[v]}: transition target index "
                        f"{target} out of range"
                    )
                if not 0 <= num <= g.one:
                    problems.append(
                        f"state {g.states[v]}: probability numerator {num} "
                        f"outside [0, 2^{g.lbits}]"
                    )
                total += num
            if total != g.one:
                problems.append(
                    f"state {g.states[v]}, action tuple {theta}: "
                    f"row sum {total} != 2^{g.lbits} (row sum != 1)"
                )
    for (v, theta) in g.trans:
        expected = len(g.playing[v])
        if len(theta) != expected:
            problems.append(
                f"state {g.states[v]}: transition row keyed by "
                f"{len(theta)}-tuple, expected {expected}-tuple"
            )
    if len(g.goals) != k:
        problems.append("goal sets not defined for every agent")
    for i, goal in enumerate(g.goals):
        if any(not 0 <= v < g.num_states for v in goal):
            problems.append(f"agent {i + 1}: goal contains unknown state")
    return problems


def check_history(g: GameSystem, seq: Iterable[int]) -> list[str]:
    """Violations of the history invariants for a state-index sequence."""
    h = tuple(seq)
    problems: list[str] = []
    if not 1 <= len(h) <= g.horizon:
        problems.append(f"history length {len(h)} outside [1, {g.horizon}]")
    if h and h[0] != g.init:
        problems.append("history does not start at the initial state")
    for j in range(len(h) - 1):
        if h[j + 1] not in g.positive_targets(h[j]):
            problems.append(
                f"no positive-probability transition "
                f"{g.states[h[j]]} -> {g.states[h[j + 1]]}"
            )
    return problems


def check_play(g: GameSystem, seq: Iterable[int]) -> list[str]:
    """Violations of the play invariants (exact horizon length)."""
    t = tuple(seq)
    problems: list[str] = []
    if len(t) != g.horizon:
        problems.append(f"play length {len(t)} != horizon {g.horizon}")
    if t and t[0] != g.init:
        problems.append("play does not start at the initial state")
    for j in range(len(t) - 1):
        if t[j + 1] not in g.positive_targets(t[j]):
            problems.append(
                f"no positive-probability transition "
                f"{g.states[t[j]]} -> {g.states[t[j + 1]]}"
            )
    return problems


def payoff_of_play(g: GameSystem, play: Iterable[int], agent: int) -> int:
    """1 iff the play visits the agent's goal set, else 0.

    The first state counts: a play starting inside the goal already pays 1.
    """
    t = tuple(play)
    if len(t) != g.horizon:
        raise ValueError(f"play length {len(t)} != horizon {g.horizon}")
    goal = g.goals[agent]
    return 1 if any(v in goal for v in t) else 0
