"""Finite-state strategy machines and their product.

A strategy transducer reads game states and emits, at every state where its
agent is active, a dyadic distribution over the agent's actions.  State
updates are deterministic and total.  Where the agent is inactive the
output entry is an explicit ``None`` sentinel; consulting one is a bug in
the caller, not a recoverable condition, so it trips an assertion.

Timing convention used throughout the package: the output emitted *at* a
game state uses the transducer state from *before* that game state is read;
the read happens together with the game transition.  Equivalently, the
product-transducer component of a chain node has not yet consumed the
node's game state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .model import GameSystem, Theta

_MISSING = object()


@dataclass
class StrategyTransducer:
    """One agent's strategy.

    ``delta`` maps ``(tstate, game_state) -> tstate`` and must be total.
    ``output`` maps ``(tstate, game_state)`` to either an action-numerator
    dict over ``2**lbits`` or ``None`` (the inactive-agent sentinel).
    """

    agent: int  # 0-based agent index
    tstates: tuple[str, ...]
    init: int
    delta: dict[tuple[int, int], int]
    output: dict[tuple[int, int], dict[int, int] | None]
    lbits: int

    @property
    def num_states(self) -> int:
        return len(self.tstates)

    def step(self, s: int, v: int) -> int:
        return self.delta[(s, v)]

    def read(self, s: int, word: Iterable[int]) -> int:
        for v in word:
            s = self.delta[(s, v)]
        return s

    def dist(self, s: int, v: int) -> dict[int, int]:
        out = self.output[(s, v)]
        assert out is not None, (
            f"agent {self.agent + 1} consulted at a state where it is inactive"
        )
        return out


def validate_transducer(g: GameSystem, t: StrategyTransducer) -> list[str]:
    """Structural checks of one transducer against its game.

    Returns violations; empty means the machine is total, its lbits match
    the game, and its outputs are unit distributions exactly where agent
    ``t.agent`` is active.
    """
    problems: list[str] = []
    name = f"agent {t.agent + 1} transducer"
    if t.lbits != g.lbits:
        problems.append(f"{name}: lbits {t.lbits} != game lbits {g.lbits}")
    if not 0 <= t.init < t.num_states:
        problems.append(f"{name}: initial state index out of range")
    if not 0 <= t.agent < g.num_agents:
        problems.append(f"{name}: agent index out of range")
        return problems
    acts = g.actions[t.agent]
    for s in range(t.num_states):
        for v in range(g.num_states):
            nxt = t.delta.get((s, v))
            if nxt is None:
                problems.append(
                    f"{name}: no transition from {t.tstates[s]} "
                    f"on {g.states[v]}"
                )
            elif not 0 <= nxt < t.num_states:
                problems.append(
                    f"{name}: transition from {t.tstates[s]} on "
                    f"{g.states[v]} leaves the state set"
                )
            out = t.output.get((s, v), _MISSING)
            active = t.agent in g.playing[v]
            if out is _MISSING:
                problems.append(
                    f"{name}: no output entry at ({t.tstates[s]}, "
                    f"{g.states[v]})"
                )
            elif out is None:
                if active:
                    problems.append(
                        f"{name}: output at ({t.tstates[s]}, {g.states[v]}) "
                        f"is bot but the agent is active there"
                    )
            else:
                if not active:
                    problems.append(
                        f"{name}: output at ({t.tstates[s]}, {g.states[v]}) "
                        f"defined but the agent is inactive there"
                    )
                total = 0
                for a, num in out.items():
                    if not 0 <= a < len(acts):
                        problems.append(
                            f"{name}: output at ({t.tstates[s]}, "
                            f"{g.states[v]}) names an unknown action"
                        )
                    if not 0 <= num <= g.one:
                        problems.append(
                            f"{name}: output numerator {num} outside "
                            f"[0, 2^{g.lbits}]"
                        )
                    total += num
                if total != g.one:
                    problems.append(
                        f"{name}: output at ({t.tstates[s]}, {g.states[v]}) "
                        f"sums to {total} != 2^{g.lbits}"
                    )
    return problems


@dataclass
class ProductTransducer:
    """The component-wise product of one transducer per agent."""

    parts: tuple[StrategyTransducer, ...]

    @classmethod
    def of(cls, parts: Sequence[StrategyTransducer]) -> "ProductTransducer":
        return cls(tuple(parts))

    @property
    def init(self) -> tuple[int, ...]:
        return tuple(t.init for t in self.parts)

    @property
    def num_states(self) -> int:
        n = 1
        for t in self.parts:
            n *= t.num_states
        return n

    def state_names(self, s: tuple[int, ...]) -> tuple[str, ...]:
        return tuple(t.tstates[si] for t, si in zip(self.parts, s))


def validate_profile(
    g: GameSystem, parts: Sequence[StrategyTransducer]
) -> list[str]:
    """Checks a whole profile: one machine per agent, in agent order."""
    problems: list[str] = []
    if len(parts) != g.num_agents:
        problems.append(
            f"profile has {len(parts)} transducers for {g.num_agents} agents"
        )
    for i, t in enumerate(parts):
        if t.agent != i:
            problems.append(
                f"transducer in position {i + 1} declares agent {t.agent + 1}"
            )
        problems.extend(validate_transducer(g, t))
    return problems


def advance(pt: ProductTransducer, s: tuple[int, ...], v: int) -> tuple[int, ...]:
    """Component-wise deterministic step of the product on game state ``v``."""
    return tuple(t.delta[(si, v)] for t, si in zip(pt.parts, s))


def joint_action_prob(
    g: GameSystem,
    pt: ProductTransducer,
    s: tuple[int, ...],
    v: int,
    theta: Theta,
) -> Fraction:
    """Probability that the active agents jointly emit ``theta`` at ``v``.

    The empty product (no active agents) is 1.
    """
    active = g.playing[v]
    if len(theta) != len(active):
        raise ValueError(
            f"action tuple of length {len(theta)} at state with "
            f"{len(active)} active agents"
        )
    num = 1
    for i, a in zip(active, theta):
        part = pt.parts[i]
        out = part.dist(s[i], v)
        if a not in range(len(g.actions[i])):
            raise ValueError(f"action index {a} not in agent {i + 1}'s set")
        num *= out.get(a, 0)
        if num == 0:
            return Fraction(0)
    return Fraction(num, 1 << (g.lbits * len(active)))


def substrategy(t: StrategyTransducer, h: Sequence[int]) -> StrategyTransducer:
    """The same machine repositioned after the history ``h``.

    The machine reads every history element except the last: the final
    history state is the subgame's current state and has not been consumed
    yet when the subgame's first output is requested.  In particular the
    one-element history leaves the machine untouched, which is what makes
    the whole-game equilibrium condition the special case of the subgame
    condition at the trivial history.
    """
    if len(h) < 1:
        raise ValueError("histories have at least one state")
    return replace(t, init=t.read(t.init, h[:-1]))
