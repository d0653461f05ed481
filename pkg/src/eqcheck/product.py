"""The chain induced by a profile, the per-agent deviation MDP, and the
reachability passes over both.

A chain node is ``(v, s, n)``: game state, product-transducer state, time
index.  Nodes at the horizon are terminal.  Transition probabilities
factor as p_v * p_s * p_n where p_s and p_n are 0/1 tests (deterministic
transducer step, time increments by one) and p_v aggregates the active
agents' output distributions against the game's transition rows.

All explorations are breadth-first with successors visited in state-index
order, so discovery order, predecessor links and every downstream report
are deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

from .model import CapExceeded, GameSystem
from .strategy import ProductTransducer, advance, joint_action_prob


class ChainState(NamedTuple):
    v: int
    s: tuple[int, ...]
    n: int


@dataclass
class ReachSet:
    """States discovered by one exploration, with predecessor links.

    ``order`` is the BFS discovery order; ``parent`` holds one witnessing
    predecessor per state (``None`` at the root), which for the
    history-based exploration doubles as the stored witness history.
    """

    root: ChainState
    order: list[ChainState] = field(default_factory=list)
    parent: dict[ChainState, ChainState | None] = field(default_factory=dict)

    def __contains__(self, state: ChainState) -> bool:
        return state in self.parent

    def __len__(self) -> int:
        return len(self.order)

    def witness_history(self, state: ChainState) -> tuple[int, ...]:
        """Game-state indices along the stored path from the root."""
        path = []
        cur: ChainState | None = state
        while cur is not None:
            path.append(cur.v)
            cur = self.parent[cur]
        return tuple(reversed(path))


def profile_row(
    g: GameSystem, pt: ProductTransducer, v: int, s: tuple[int, ...]
) -> dict[int, Fraction]:
    """Successor distribution over game states when everyone follows the
    profile at ``(v, s)``; keys sorted, zero entries omitted."""
    acc: dict[int, Fraction] = {}
    for theta in g.theta_space(v):
        w = joint_action_prob(g, pt, s, v, theta)
        if w == 0:
            continue
        for target, num in g.row(v, theta).items():
            if num:
                acc[target] = acc.get(target, Fraction(0)) + w * Fraction(num, g.one)
    return {t: acc[t] for t in sorted(acc)}


def chain_prob(
    g: GameSystem, pt: ProductTransducer, src: ChainState, dst: ChainState
) -> Fraction:
    """Transition probability between two chain nodes (p_v * p_s * p_n)."""
    if src.n >= g.horizon:
        raise ValueError("terminal chain state has no outgoing transitions")
    if dst.n != src.n + 1:
        return Fraction(0)
    if dst.s != advance(pt, src.s, src.v):
        return Fraction(0)
    return profile_row(g, pt, src.v, src.s).get(dst.v, Fraction(0))


def deviation_rows(
    g: GameSystem, pt: ProductTransducer, state: ChainState, agent: int
) -> list[tuple[int | None, dict[int, Fraction]]]:
    """Successor rows available to ``agent`` at a chain node.

    Where the agent is active there is one row per deterministic action
    choice, in action declaration order, holding the other agents to their
    profile outputs.  Where it is inactive there is the single
    profile-induced row, keyed by ``None``.
    """
    v, s, n = state
    if n >= g.horizon:
        raise ValueError("terminal chain state has no actions")
    active = g.playing[v]
    if agent not in active:
        return [(None, profile_row(g, pt, v, s))]
    pos = active.index(agent)
    others = [i for i in active if i != agent]
    rows: list[tuple[int | None, dict[int, Fraction]]] = []
    for a in range(len(g.actions[agent])):
        acc: dict[int, Fraction] = {}
        for theta in g.theta_space(v):
            if theta[pos] != a:
                continue
            num = 1
            for i, ai in zip(active, theta):
                if i == agent:
                    continue
                num *= pt.parts[i].dist(s[i], v).get(ai, 0)
                if num == 0:
                    break
            if num == 0:
                continue
            w = Fraction(num, 1 << (g.lbits * len(others)))
            for target, tnum in g.row(v, theta).items():
                if tnum:
                    acc[target] = acc.get(target, Fraction(0)) + w * Fraction(
                        tnum, g.one
                    )
        rows.append((a, {t: acc[t] for t in sorted(acc)}))
    return rows


def mdp_actions(
    g: GameSystem, pt: ProductTransducer, state: ChainState, agent: int
) -> list[tuple[int | None, dict[int, Fraction]]]:
    """Alias with the operation's public name; see :func:`deviation_rows`."""
    return deviation_rows(g, pt, state, agent)


def _check_budget(g: GameSystem, cap: int) -> None:
    # every time slice up to the horizon is nonempty, so the explored set
    # has at least `horizon` members; refuse huge horizons before looping
    if g.horizon > cap:
        raise CapExceeded(cap)


def explore_chain(g: GameSystem, pt: ProductTransducer, cap: int) -> ReachSet:
    """All chain nodes reachable with positive probability under the profile."""
    _check_budget(g, cap)
    root = ChainState(g.init, pt.init, 1)
    reach = ReachSet(root=root, order=[root], parent={root: None})
    queue = deque([root])
    while queue:
        cur = queue.popleft()
        if cur.n >= g.horizon:
            continue
        nxt_s = advance(pt, cur.s, cur.v)
        for target in profile_row(g, pt, cur.v, cur.s):
            succ = ChainState(target, nxt_s, cur.n + 1)
            if succ not in reach.parent:
                if len(reach.order) >= cap:
                    raise CapExceeded(cap)
                reach.parent[succ] = cur
                reach.order.append(succ)
                queue.append(succ)
    return reach


def explore_mdp(
    g: GameSystem,
    pt: ProductTransducer,
    agent: int,
    cap: int,
    seeds: list[ChainState] | None = None,
) -> ReachSet:
    """Closure under the deviation MDP's successor rows.

    Explores from the chain root (or the given seeds) with ``agent``'s
    action unconstrained and everyone else on the profile.  The result is
    closed under profile successors as well, because the profile row is a
    mixture of the deviation rows.
    """
    _check_budget(g, cap)
    root = ChainState(g.init, pt.init, 1)
    reach = ReachSet(root=root)
    queue: deque[ChainState] = deque()
    for seed in seeds if seeds is not None else [root]:
        if seed not in reach.parent:
            reach.parent[seed] = None
            reach.order.append(seed)
            queue.append(seed)
    while queue:
        cur = queue.popleft()
        if cur.n >= g.horizon:
            continue
        nxt_s = advance(pt, cur.s, cur.v)
        targets: set[int] = set()
        for _, row in deviation_rows(g, pt, cur, agent):
            targets.update(row)
        for target in sorted(targets):
            succ = ChainState(target, nxt_s, cur.n + 1)
            if succ not in reach.parent:
                if len(reach.order) >= cap:
                    raise CapExceeded(cap)
                reach.parent[succ] = cur
                reach.order.append(succ)
                queue.append(succ)
    return reach


def relevant_reachable(
    g: GameSystem, pt: ProductTransducer, agent: int, cap: int
) -> ReachSet:
    """Chain nodes reachable by a history that avoids the agent's goal.

    Histories follow arbitrary positive-probability joint actions (the
    profile's output weights are not consulted); the transducer component
    still advances deterministically.  Any node whose game state lies in
    the agent's goal is pruned, endpoint included: once the goal is met
    the agent's subgame payoff is fixed at 1 and no deviation there can be
    profitable.  The predecessor links store one witnessing history per
    member, first-discovered in BFS order.
    """
    _check_budget(g, cap)
    root = ChainState(g.init, pt.init, 1)
    reach = ReachSet(root=root)
    goal = g.goals[agent]
    if g.init in goal:
        return reach
    reach.order.append(root)
    reach.parent[root] = None
    queue = deque([root])
    while queue:
        cur = queue.popleft()
        if cur.n >= g.horizon:
            continue
        nxt_s = advance(pt, cur.s, cur.v)
        for target in g.positive_targets(cur.v):
            if target in goal:
                continue
            succ = ChainState(target, nxt_s, cur.n + 1)
            if succ not in reach.parent:
                if len(reach.order) >= cap:
                    raise CapExceeded(cap)
                reach.parent[succ] = cur
                reach.order.append(succ)
                queue.append(succ)
    return reach
