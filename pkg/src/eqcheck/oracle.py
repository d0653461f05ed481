"""Independent brute-force references for the main algorithms.

Everything here recomputes payoffs by enumerating plays (or policies, or
per-node one-shot equilibria) straight off the game and transducer tables.
None of the chain, exploration or sweep machinery is reused: agreement
between this module and the solver modules on the same instance is the
package's primary correctness evidence, so the two sides must not share a
code path.

Desk scale only; every entry point refuses on a budget instead of running
away.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator, Sequence

from .model import CapExceeded, GameSystem
from .strategy import StrategyTransducer

ZERO = Fraction(0)
ONE = Fraction(1)

Node = tuple[int, tuple[int, ...], int]  # (game state, transducer states, time)


class SynthesisRefusal(Exception):
    """No representable equilibrium distribution exists at some node."""


def _joint_outputs(
    g: GameSystem,
    ts: Sequence[StrategyTransducer],
    svec: tuple[int, ...],
    v: int,
    override: tuple[int, int] | None = None,
) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Joint action tuples at ``v`` with positive probability.

    ``override=(agent, action)`` pins one agent to a deterministic action,
    leaving the others on their transducer outputs.
    """
    active = g.playing[v]
    per_agent: list[list[tuple[int, Fraction]]] = []
    for i in active:
        if override is not None and override[0] == i:
            per_agent.append([(override[1], ONE)])
            continue
        out = ts[i].output[(svec[i], v)]
        assert out is not None
        per_agent.append(
            [(a, Fraction(num, g.one)) for a, num in sorted(out.items()) if num]
        )
    for combo in itertools.product(*per_agent):
        theta = tuple(a for a, _ in combo)
        w = ONE
        for _, p in combo:
            w *= p
        yield theta, w


def _advance(
    ts: Sequence[StrategyTransducer], svec: tuple[int, ...], v: int
) -> tuple[int, ...]:
    return tuple(t.delta[(si, v)] for t, si in zip(ts, svec))


def play_tree(
    g: GameSystem, ts: Sequence[StrategyTransducer], cap: int = 200_000
) -> list[tuple[tuple[int, ...], Fraction]]:
    """Every positive-probability play with its exact probability."""
    plays: list[tuple[tuple[int, ...], Fraction]] = []

    def walk(v: int, svec: tuple[int, ...], prefix: tuple[int, ...], p: Fraction):
        if len(prefix) == g.horizon:
            if len(plays) >= cap:
                raise CapExceeded(cap, "enumerated plays")
            plays.append((prefix, p))
            return
        nxt = _advance(ts, svec, v)
        for theta, w in _joint_outputs(g, ts, svec, v):
            for target, num in sorted(g.row(v, theta).items()):
                if num:
                    walk(target, nxt, prefix + (target,),
                         p * w * Fraction(num, g.one))

    walk(g.init, tuple(t.init for t in ts), (g.init,), ONE)
    return plays


def oracle_payoff(
    g: GameSystem,
    ts: Sequence[StrategyTransducer],
    agent: int,
    cap: int = 200_000,
) -> Fraction:
    """Expected payoff by full play enumeration."""
    goal = g.goals[agent]
    total = ZERO
    for play, p in play_tree(g, ts, cap):
        if any(v in goal for v in play):
            total += p
    return total


def _deviation_nodes(
    g: GameSystem, ts: Sequence[StrategyTransducer], agent: int, cap: int
) -> list[Node]:
    """Nodes reachable while ``agent`` plays arbitrarily, others as given."""
    if g.horizon > cap:
        raise CapExceeded(cap)
    root: Node = (g.init, tuple(t.init for t in ts), 1)
    seen = {root}
    order = [root]
    frontier = [root]
    while frontier:
        nxt_frontier = []
        for v, svec, n in frontier:
            if n >= g.horizon:
                continue
            nxt = _advance(ts, svec, v)
            targets: set[int] = set()
            if agent in g.playing[v]:
                choices = range(len(g.actions[agent]))
            else:
                choices = (None,)
            for choice in choices:
                over = (agent, choice) if choice is not None else None
                for theta, _ in _joint_outputs(g, ts, svec, v, override=over):
                    targets.update(
                        t for t, num in g.row(v, theta).items() if num
                    )
            for target in sorted(targets):
                node: Node = (target, nxt, n + 1)
                if node not in seen:
                    if len(order) >= cap:
                        raise CapExceeded(cap)
                    seen.add(node)
                    order.append(node)
                    nxt_frontier.append(node)
        frontier = nxt_frontier
    return order


def oracle_best_response(
    g: GameSystem,
    ts: Sequence[StrategyTransducer],
    agent: int,
    cap: int = 200_000,
    policy_cap: int = 4096,
) -> Fraction:
    """Best deviation payoff by exhaustive deterministic-policy enumeration.

    Policies map every reachable node where the agent is active to one of
    its actions; each policy's payoff is evaluated exactly and the maximum
    is returned.  Refuses when the policy space exceeds ``policy_cap``.
    """
    nodes = _deviation_nodes(g, ts, agent, cap)
    decisions = [
        node for node in nodes
        if node[2] < g.horizon and agent in g.playing[node[0]]
    ]
    num_actions = len(g.actions[agent])
    if num_actions ** len(decisions) > policy_cap:
        raise CapExceeded(policy_cap, "deviation policies")
    goal = g.goals[agent]
    best: Fraction | None = None
    for assignment in itertools.product(range(num_actions), repeat=len(decisions)):
        policy = dict(zip(decisions, assignment))
        memo: dict[Node, Fraction] = {}

        def value(node: Node) -> Fraction:
            v, svec, n = node
            if v in goal:
                return ONE
            if n >= g.horizon:
                return ZERO
            if node in memo:
                return memo[node]
            nxt = _advance(ts, svec, v)
            over = (agent, policy[node]) if node in policy else None
            total = ZERO
            for theta, w in _joint_outputs(g, ts, svec, v, override=over):
                for target, num in g.row(v, theta).items():
                    if num:
                        total += w * Fraction(num, g.one) * value((target, nxt, n + 1))
            memo[node] = total
            return total

        got = value(nodes[0])
        if best is None or got > best:
            best = got
    assert best is not None
    return best


def synthesize_spe(
    g: GameSystem, cap: int = 200_000
) -> list[StrategyTransducer]:
    """Build a time-indexed equilibrium profile by backwards induction.

    At each (state, time) the active agents play a one-shot game whose
    payoffs are exact continuation values; the first pure equilibrium in
    lexicographic action order is taken, falling back to an exact
    full-support mixed fix for two-agent two-action nodes when the mixing
    weights land on the instance's dyadic grid.  Raises
    :class:`SynthesisRefusal` when neither exists; the caller is a fixture
    generator and simply skips such instances.
    """
    if g.horizon * g.num_states > cap:
        raise CapExceeded(cap, "state-time pairs")
    horizon = g.horizon
    vals: list[dict[tuple[int, int], Fraction]] = [
        {} for _ in range(g.num_agents)
    ]
    choice: dict[tuple[int, int], dict[int, dict[int, int]]] = {}
    for v in range(g.num_states):
        for i in range(g.num_agents):
            vals[i][(v, horizon)] = ONE if v in g.goals[i] else ZERO
    for n in range(horizon - 1, 0, -1):
        for v in range(g.num_states):
            picked = _pick_node_equilibrium(g, vals, v, n)
            choice[(v, n)] = picked
            for i in range(g.num_agents):
                if v in g.goals[i]:
                    vals[i][(v, n)] = ONE
                else:
                    total = ZERO
                    for theta, w in _dist_thetas(g, v, picked):
                        for target, num in g.row(v, theta).items():
                            if num:
                                total += w * Fraction(num, g.one) * vals[i][
                                    (target, n + 1)
                                ]
                    vals[i][(v, n)] = total
    return [_markov_transducer(g, i, choice) for i in range(g.num_agents)]


def _dist_thetas(
    g: GameSystem, v: int, picked: dict[int, dict[int, int]]
) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Joint actions and weights under per-agent numerator distributions."""
    active = g.playing[v]
    per_agent = [
        [(a, Fraction(num, g.one)) for a, num in sorted(picked[i].items()) if num]
        for i in active
    ]
    for combo in itertools.product(*per_agent):
        theta = tuple(a for a, _ in combo)
        w = ONE
        for _, p in combo:
            w *= p
        yield theta, w


def _pick_node_equilibrium(
    g: GameSystem,
    vals: list[dict[tuple[int, int], Fraction]],
    v: int,
    n: int,
) -> dict[int, dict[int, int]]:
    """Choose per-agent output numerators at one (state, time) node."""
    active = g.playing[v]
    if not active:
        return {}

    def util(i: int, theta: tuple[int, ...]) -> Fraction:
        if v in g.goals[i]:
            return ONE
        total = ZERO
        for target, num in g.row(v, theta).items():
            if num:
                total += Fraction(num, g.one) * vals[i][(target, n + 1)]
        return total

    thetas = list(g.theta_space(v))
    for theta in thetas:
        if _is_pure_equilibrium(g, util, active, theta):
            return {
                i: {a: g.one} for i, a in zip(active, theta)
            }
    if len(active) == 2 and all(len(g.actions[i]) == 2 for i in active):
        mixed = _mixed_2x2(g, util, active)
        if mixed is not None:
            return mixed
    raise SynthesisRefusal(
        f"no representable equilibrium at state {g.states[v]}, time {n}"
    )


def _is_pure_equilibrium(g, util, active, theta) -> bool:
    for pos, i in enumerate(active):
        mine = util(i, theta)
        for a in range(len(g.actions[i])):
            alt = theta[:pos] + (a,) + theta[pos + 1:]
            if util(i, alt) > mine:
                return False
    return True


def _mixed_2x2(g, util, active) -> dict[int, dict[int, int]] | None:
    """Exact full-support mixed point of a 2x2 node, if grid-representable."""
    i, j = active
    ui = {(a, b): util(i, (a, b)) for a in (0, 1) for b in (0, 1)}
    uj = {(a, b): util(j, (a, b)) for a in (0, 1) for b in (0, 1)}
    di = ui[(0, 0)] - ui[(1, 0)] - ui[(0, 1)] + ui[(1, 1)]
    dj = uj[(0, 0)] - uj[(0, 1)] - uj[(1, 0)] + uj[(1, 1)]
    if di == 0 or dj == 0:
        return None
    q = (ui[(1, 1)] - ui[(0, 1)]) / di  # j's weight on its first action
    p = (uj[(1, 1)] - uj[(1, 0)]) / dj  # i's weight on its first action
    if not (0 < p < 1 and 0 < q < 1):
        return None
    for w in (p, q):
        d = w.denominator
        if d & (d - 1) or d > g.one:
            return None  # not on the dyadic grid
    pn = p.numerator * (g.one // p.denominator)
    qn = q.numerator * (g.one // q.denominator)
    return {i: {0: pn, 1: g.one - pn}, j: {0: qn, 1: g.one - qn}}


def _markov_transducer(
    g: GameSystem, agent: int, choice: dict[tuple[int, int], dict[int, dict[int, int]]]
) -> StrategyTransducer:
    """Encode a (state, time) strategy as a clock transducer.

    State ``t<n>`` serves time ``n``; reads advance the clock and saturate
    at the horizon.  Outputs at the final clock state are never consulted
    and filled with the agent's first action.
    """
    horizon = g.horizon
    tstates = tuple(f"t{n}" for n in range(1, horizon + 1))
    delta = {
        (s, v): min(s + 1, horizon - 1)
        for s in range(horizon)
        for v in range(g.num_states)
    }
    output: dict[tuple[int, int], dict[int, int] | None] = {}
    for s in range(horizon):
        n = s + 1
        for v in range(g.num_states):
            if agent not in g.playing[v]:
                output[(s, v)] = None
            elif n < horizon and agent in choice.get((v, n), {}):
                output[(s, v)] = dict(choice[(v, n)][agent])
            else:
                output[(s, v)] = {0: g.one}  # terminal time: never consulted
    return StrategyTransducer(
        agent=agent,
        tstates=tstates,
        init=0,
        delta=delta,
        output=output,
        lbits=g.lbits,
    )
