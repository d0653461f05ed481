"""Exact hitting probabilities and best-response values by backwards
induction over the time-sliced chain.

The time index makes the chain acyclic, so one descending sweep is a
complete solver: no linear system is materialized and no iteration is
needed.  A naive equation-per-state formulation could be underdetermined
on a general chain (mutually-referential non-target states admit infinitely
many solutions), which is exactly why the sweep, not a generic solve, is
the implementation.

Every value is a reduced :class:`fractions.Fraction`; denominators stay
powers of two and their exponents are bounded by :func:`bit_bound`.
"""

from __future__ import annotations

from fractions import Fraction

from .model import CapExceeded, GameSystem
from .product import (
    ChainState,
    ReachSet,
    deviation_rows,
    explore_chain,
    profile_row,
)
from .strategy import ProductTransducer, advance

ZERO = Fraction(0)
ONE = Fraction(1)


def _slices(reach: ReachSet) -> list[list[ChainState]]:
    """States grouped by time index, descending, each slice sorted."""
    by_n: dict[int, list[ChainState]] = {}
    for state in reach.order:
        by_n.setdefault(state.n, []).append(state)
    return [sorted(by_n[n]) for n in sorted(by_n, reverse=True)]


def hitting_probabilities(
    g: GameSystem, pt: ProductTransducer, agent: int, reach: ReachSet
) -> dict[ChainState, Fraction]:
    """Probability of visiting the agent's goal from every explored node.

    Nodes whose game state is already in the goal carry value 1; terminal
    nodes outside it carry 0; everything else is the exact expectation over
    its profile successors.  ``reach`` must be closed under profile
    successors from non-goal non-terminal nodes, which every exploration in
    this package guarantees.
    """
    goal = g.goals[agent]
    table: dict[ChainState, Fraction] = {}
    for slice_states in _slices(reach):
        for state in slice_states:
            if state.v in goal:
                table[state] = ONE
            elif state.n >= g.horizon:
                table[state] = ZERO
            else:
                nxt_s = advance(pt, state.s, state.v)
                total = ZERO
                for target, p in profile_row(g, pt, state.v, state.s).items():
                    total += p * table[ChainState(target, nxt_s, state.n + 1)]
                table[state] = total
    return table


def payoff(
    g: GameSystem, pt: ProductTransducer, agent: int, cap: int
) -> Fraction:
    """The agent's expected payoff under the profile, from the start."""
    if g.init in g.goals[agent]:
        return ONE
    reach = explore_chain(g, pt, cap)
    table = hitting_probabilities(g, pt, agent, reach)
    return table[reach.root]


def best_response_values(
    g: GameSystem, pt: ProductTransducer, agent: int, reach: ReachSet
) -> dict[ChainState, tuple[Fraction, int | None]]:
    """Optimal one-agent-deviates values with the achieving action.

    ``reach`` must be closed under all deviation rows (see
    :func:`eqcheck.product.explore_mdp`).  Ties between actions break to
    the smallest declaration index, so recorded policies are reproducible.
    """
    goal = g.goals[agent]
    table: dict[ChainState, tuple[Fraction, int | None]] = {}
    for slice_states in _slices(reach):
        for state in slice_states:
            if state.v in goal:
                table[state] = (ONE, None)
            elif state.n >= g.horizon:
                table[state] = (ZERO, None)
            else:
                nxt_s = advance(pt, state.s, state.v)
                best: Fraction | None = None
                best_action: int | None = None
                for action, row in deviation_rows(g, pt, state, agent):
                    total = ZERO
                    for target, p in row.items():
                        total += p * table[ChainState(target, nxt_s, state.n + 1)][0]
                    if best is None or total > best:
                        best = total
                        best_action = action
                assert best is not None
                table[state] = (best, best_action)
    return table


def bit_bound(g: GameSystem, pt: ProductTransducer) -> int:
    """Ceiling on the bit length of any value the sweeps can produce.

    Evaluates F * (ceil(log2(|V|*|S|)) + ceil(log2(maxA**b)) + (b+1)*lbits)
    where |S| is the product state count and maxA the largest action set.
    Used as an assertion ceiling on denominator exponents: one induction
    step multiplies in at most b output probabilities and one transition
    probability, each of lbits bits, and there are fewer than F steps.
    """
    max_actions = max(len(acts) for acts in g.actions)
    states_term = _ceil_log2(g.num_states * pt.num_states)
    chain_lbits = _ceil_log2(max_actions**g.bound) + (g.bound + 1) * g.lbits
    return g.horizon * (states_term + chain_lbits)


def _ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError("log of non-positive size")
    return (x - 1).bit_length()


def denominator_exponent(value: Fraction) -> int:
    """The e with denominator == 2**e; raises if it is not a power of two."""
    d = value.denominator
    e = d.bit_length() - 1
    if 1 << e != d:
        raise ValueError(f"denominator {d} is not a power of two")
    return e


def format_value_table(
    g: GameSystem,
    pt: ProductTransducer,
    table: dict[ChainState, Fraction],
) -> str:
    """Render a value table as sorted ``state <v> <s> <n> = <num>/<den>`` lines."""
    lines = []
    for state in sorted(table, key=lambda c: (c.n, c.v, c.s)):
        value = table[state]
        s_names = ",".join(pt.state_names(state.s))
        lines.append(
            f"state {g.states[state.v]} ({s_names}) {state.n} = "
            f"{value.numerator}/{value.denominator}"
        )
    return "\n".join(lines)
