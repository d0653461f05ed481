"""Equilibrium decision procedures.

The whole-profile check compares each agent's on-profile payoff with its
deviation-MDP optimum at the start.  The subgame check uses the one-step
improvement criterion: the profile survives every subgame iff no
history-reachable node (outside the agent's goal shadow) admits a strict
one-step improvement of its hitting probability by switching that agent's
output to a single deterministic action.  Soundness is immediate (a local
switch realizes the better subgame value); completeness holds because a
value table that dominates all one-step backups on the history-reachable
set dominates every deviating policy, slice by slice.

Agents are scanned in index order and the first witness is reported, so
verdicts are deterministic; ``all_witnesses`` keeps scanning instead of
stopping at the first refutation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .model import CapExceeded, GameSystem
from .product import (
    ChainState,
    deviation_rows,
    explore_chain,
    explore_mdp,
    relevant_reachable,
)
from .strategy import ProductTransducer, advance
from .values import best_response_values, hitting_probabilities, payoff

DEFAULT_CAP = 10**7


class VerdictKind(enum.Enum):
    NE_YES = "NE"
    NE_NO = "NOT_NE"
    SPE_YES = "SPE"
    SPE_NO = "NOT_SPE"
    REFUSED = "REFUSED"


@dataclass
class Witness:
    """Evidence for a refutation.

    ``profile_payoff < deviation_payoff`` strictly, by exact comparison.
    For subgame refutations the payoffs are the subgame values at the
    witnessing node before and after the one-step switch, and the node,
    its stored history and the improving action are filled in.
    """

    agent: int
    profile_payoff: Fraction
    deviation_payoff: Fraction
    state: ChainState | None = None
    history: tuple[int, ...] | None = None
    action: int | None = None


@dataclass
class Verdict:
    kind: VerdictKind
    witnesses: tuple[Witness, ...] = ()
    cap: int | None = None


def verify_nash(
    g: GameSystem,
    pt: ProductTransducer,
    cap: int = DEFAULT_CAP,
    all_witnesses: bool = False,
) -> Verdict:
    """Decide whether the profile survives every unilateral deviation."""
    found: list[Witness] = []
    try:
        for agent in range(g.num_agents):
            if g.init in g.goals[agent]:
                continue  # payoff already 1; no deviation can be profitable
            p = payoff(g, pt, agent, cap)
            mdp = explore_mdp(g, pt, agent, cap)
            q = best_response_values(g, pt, agent, mdp)[mdp.root][0]
            if q > p:
                found.append(Witness(agent, p, q))
                if not all_witnesses:
                    break
    except CapExceeded as exc:
        return Verdict(VerdictKind.REFUSED, cap=exc.cap)
    if found:
        return Verdict(VerdictKind.NE_NO, witnesses=tuple(found))
    return Verdict(VerdictKind.NE_YES)


def verify_spe(
    g: GameSystem,
    pt: ProductTransducer,
    cap: int = DEFAULT_CAP,
    all_witnesses: bool = False,
) -> Verdict:
    """Decide whether the profile is an equilibrium after every history."""
    found: list[Witness] = []
    try:
        for agent in range(g.num_agents):
            witness = _improvement_for_agent(g, pt, agent, cap)
            if witness is not None:
                found.append(witness)
                if not all_witnesses:
                    break
    except CapExceeded as exc:
        return Verdict(VerdictKind.REFUSED, cap=exc.cap)
    if found:
        return Verdict(VerdictKind.SPE_NO, witnesses=tuple(found))
    return Verdict(VerdictKind.SPE_YES)


def _improvement_for_agent(
    g: GameSystem, pt: ProductTransducer, agent: int, cap: int
) -> Witness | None:
    """First one-step improvement in (latest time, lexicographic) order."""
    relevant = relevant_reachable(g, pt, agent, cap)
    if not relevant.order:
        return None  # start state already meets the goal
    closure = explore_mdp(g, pt, agent, cap, seeds=relevant.order)
    table = hitting_probabilities(g, pt, agent, closure)
    scan = sorted(relevant.order, key=lambda c: (-c.n, c.v, c.s))
    for state in scan:
        if state.n >= g.horizon or agent not in g.playing[state.v]:
            continue
        old = table[state]
        nxt_s = advance(pt, state.s, state.v)
        best: Fraction | None = None
        best_action: int | None = None
        for action, row in deviation_rows(g, pt, state, agent):
            backed = Fraction(0)
            for target, p in row.items():
                backed += p * table[ChainState(target, nxt_s, state.n + 1)]
            if best is None or backed > best:
                best = backed
                best_action = action
        if best is not None and best > old:
            return Witness(
                agent=agent,
                profile_payoff=old,
                deviation_payoff=best,
                state=state,
                history=relevant.witness_history(state),
                action=best_action,
            )
    return None


def export_witness(g: GameSystem, pt: ProductTransducer, verdict: Verdict) -> str:
    """Machine-readable report lines, rationals printed reduced."""
    kind = verdict.kind
    if kind is VerdictKind.REFUSED:
        return f"VERDICT REFUSED cap={verdict.cap}"
    if kind is VerdictKind.NE_YES:
        return "VERDICT NE"
    if kind is VerdictKind.SPE_YES:
        return "VERDICT SPE"
    lines = []
    for w in verdict.witnesses:
        if kind is VerdictKind.NE_NO:
            lines.append(
                f"VERDICT NOT_NE agent={w.agent + 1} "
                f"payoff={_rat(w.profile_payoff)} best={_rat(w.deviation_payoff)}"
            )
        else:
            assert w.state is not None and w.history is not None
            s_names = ",".join(pt.state_names(w.state.s))
            action_name = g.actions[w.agent][w.action] if w.action is not None else "-"
            history = " ".join(g.states[v] for v in w.history)
            lines.append(
                f"VERDICT NOT_SPE agent={w.agent + 1} "
                f"state={g.states[w.state.v]},({s_names}),{w.state.n} "
                f"action={action_name} "
                f"old={_rat(w.profile_payoff)} new={_rat(w.deviation_payoff)} "
                f"history={history}"
            )
    return "\n".join(lines)


def _rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"
