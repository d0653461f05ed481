"""Reference procedures used only by the test suite.

The subgame enumeration here is the definitional check the fast one-step
procedure must agree with: every history is materialized, the game and
profile are rebased onto it, and the whole-game equilibrium condition is
evaluated per agent whose goal the history has not touched.
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

from eqcheck.model import GameSystem
from eqcheck.product import ChainState, ReachSet, deviation_rows
from eqcheck.strategy import ProductTransducer, StrategyTransducer, advance
from eqcheck.values import best_response_values, payoff
from eqcheck import product, values

CAP = 10**6


def subgame_has_profitable_deviation(
    g: GameSystem,
    ts: list[StrategyTransducer],
    v: int,
    svec: tuple[int, ...],
    n: int,
    exempt: frozenset[int],
) -> bool:
    """Whole-game equilibrium check on the explicit subgame at one history.

    The rebased game restarts at the history's endpoint with the remaining
    number of transitions; the rebased transducers have consumed everything
    before the endpoint.  Agents whose goal the history visited hold a
    fixed payoff of 1 and are exempt.
    """
    sub_g = replace(g, init=v, horizon=g.horizon - n + 1)
    sub_ts = [replace(t, init=s) for t, s in zip(ts, svec)]
    sub_pt = ProductTransducer.of(sub_ts)
    for agent in range(g.num_agents):
        if agent in exempt:
            continue
        p = payoff(sub_g, sub_pt, agent, CAP)
        mdp = product.explore_mdp(sub_g, sub_pt, agent, CAP)
        q = best_response_values(sub_g, sub_pt, agent, mdp)[mdp.root][0]
        if q > p:
            return True
    return False


def spe_by_subgame_enumeration(
    g: GameSystem, ts: list[StrategyTransducer]
) -> bool:
    """True iff the profile survives every history's subgame.

    Histories are walked under arbitrary positive-probability joint
    actions and deduplicated by (endpoint, transducer states, length,
    goals met so far), which pins the induced subgame instance exactly.
    """
    root_exempt = frozenset(
        i for i in range(g.num_agents) if g.init in g.goals[i]
    )
    start = (g.init, tuple(t.init for t in ts), 1, root_exempt)
    seen = {start}
    stack = [start]
    while stack:
        v, svec, n, exempt = stack.pop()
        if subgame_has_profitable_deviation(g, ts, v, svec, n, exempt):
            return False
        if n < g.horizon:
            nxt = tuple(t.delta[(s, v)] for t, s in zip(ts, svec))
            for v2 in g.positive_targets(v):
                exempt2 = exempt | frozenset(
                    i for i in range(g.num_agents) if v2 in g.goals[i]
                )
                node = (v2, nxt, n + 1, exempt2)
                if node not in seen:
                    seen.add(node)
                    stack.append(node)
    return True


def replay_policy_value(
    g: GameSystem,
    pt: ProductTransducer,
    agent: int,
    reach: ReachSet,
    policy: dict[ChainState, tuple[Fraction, int | None]],
) -> Fraction:
    """Value at the root of following the recorded argmax actions.

    Independent sweep over the same fragment: rows are picked by the
    stored action instead of re-maximizing, so exact agreement with the
    recorded optimum certifies the witness.
    """
    goal = g.goals[agent]
    table: dict[ChainState, Fraction] = {}
    for state in sorted(reach.order, key=lambda c: -c.n):
        if state.v in goal:
            table[state] = Fraction(1)
        elif state.n >= g.horizon:
            table[state] = Fraction(0)
        else:
            nxt = advance(pt, state.s, state.v)
            want = policy[state][1]
            rows = dict(deviation_rows(g, pt, state, agent))
            row = rows[want]
            table[state] = sum(
                (p * table[ChainState(t, nxt, state.n + 1)] for t, p in row.items()),
                Fraction(0),
            )
    return table[reach.root]
