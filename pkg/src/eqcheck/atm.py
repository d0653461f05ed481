"""Compilation of space-bounded alternating Turing machines into turn-based
game/profile instances, plus a direct acceptance decider for cross-checks.

The compiled game simulates the machine on ``n`` tape cells with ``n``
simulator agents (one per cell, goal = every state, so they are payoff-
indifferent) and one chooser agent.  The chooser either takes a fixed
probabilistic payoff branch at the start or launches the simulation, in
which it resolves the machine's existential branching; universal branching
is resolved by fair coin flips inside the simulators' outputs.  The input
profile sends the chooser to the fixed branch, so the profile survives the
chooser's deviations exactly when no existential strategy makes the
machine accept.

Identifiers of machine states and tape symbols must be alphanumeric: they
are embedded into generated game-state and action names.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable

from .model import CapExceeded, GameSystem
from .strategy import StrategyTransducer

LABELS = ("acc", "rej", "or", "and", "det")

Rule = tuple[int, int, str]  # (next machine state, written symbol, 'R' | 'L')

LBITS = 3  # every probability the construction uses fits in 3 bits
_HALF = 4  # 0.5  as a numerator over 2**3
_QUARTER = 2  # 0.25
_THREE_QUARTERS = 6
_FULL = 8


@dataclass
class ATM:
    """A space-bounded alternating machine.

    ``rules`` maps ``(machine state, read symbol)`` to its declared
    successors; the first-declared successor of a branching state is the
    one the chooser's first action selects.  Accepting and rejecting
    states need no rules.
    """

    mstates: tuple[str, ...]
    labels: tuple[str, ...]
    init: int
    alphabet: tuple[str, ...]
    blank: int
    rules: dict[tuple[int, int], tuple[Rule, ...]]


def validate_atm(m: ATM) -> list[str]:
    problems: list[str] = []
    if not 0 <= m.init < len(m.mstates):
        problems.append("initial machine state out of range")
    if not 0 <= m.blank < len(m.alphabet):
        problems.append("blank symbol out of range")
    for name in m.mstates + m.alphabet:
        if not name.isalnum():
            problems.append(f"identifier {name!r} is not alphanumeric")
    for i, label in enumerate(m.labels):
        if label not in LABELS:
            problems.append(f"state {m.mstates[i]}: unknown label {label!r}")
    want = {"det": 1, "or": 2, "and": 2}
    for r, label in enumerate(m.labels):
        need = want.get(label)
        if need is None:
            continue  # accepting/rejecting states consult no successors
        for sym in range(len(m.alphabet)):
            succs = m.rules.get((r, sym), ())
            if len(succs) != need:
                problems.append(
                    f"state {m.mstates[r]} on {m.alphabet[sym]}: "
                    f"{len(succs)} successors declared, label "
                    f"{label!r} needs {need}"
                )
            for nxt, wsym, d in succs:
                if not 0 <= nxt < len(m.mstates):
                    problems.append(
                        f"state {m.mstates[r]}: successor state out of range"
                    )
                if not 0 <= wsym < len(m.alphabet):
                    problems.append(
                        f"state {m.mstates[r]}: written symbol out of range"
                    )
                if d not in ("R", "L"):
                    problems.append(
                        f"state {m.mstates[r]}: direction {d!r} not R or L"
                    )
    return problems


@dataclass
class CompiledInstance:
    game: GameSystem
    transducers: list[StrategyTransducer]
    provenance: dict[str, str]


def true_horizon(m: ATM, n: int) -> int:
    """The compiled horizon: (3 * |alphabet| * (|mstates| + 1))**n + 1.

    The machine-state factor is padded by one for the no-head marker used
    when counting tape snapshots; a snapshot transition costs at most three
    game steps.
    """
    return (3 * len(m.alphabet) * (len(m.mstates) + 1)) ** n + 1


def compile_atm(
    m: ATM, n: int, horizon_override: int | None = None
) -> CompiledInstance:
    """Build the game and the n+1 strategy transducers for ``n`` cells."""
    if n < 1:
        raise ValueError("cell count must be at least 1")
    problems = validate_atm(m)
    if problems:
        raise ValueError("invalid machine: " + "; ".join(problems))

    gamma = m.alphabet
    mstates = m.mstates
    chooser = n  # 0-based index of agent n+1

    # --- game states, in construction order -------------------------------
    names: list[str] = []
    provenance: dict[str, str] = {}

    def add(name: str, role: str) -> int:
        names.append(name)
        provenance[name] = role
        return len(names) - 1

    plain = {}
    exist = {}
    for cell in range(1, n + 1):
        plain[cell] = add(f"p{cell}", f"head at cell {cell}, awaiting move")
        exist[cell] = add(f"e{cell}", f"head at cell {cell}, awaiting branch choice")
    announce = {}
    for cell in range(1, n + 1):
        for gi, g in enumerate(gamma):
            for d in ("R", "L"):
                for ri, r in enumerate(mstates):
                    announce[(cell, gi, d, ri)] = add(
                        f"m_{cell}_{g}_{d}_{r}",
                        f"announced: cell {cell} wrote {g}, head {d}, state {r}",
                    )
    choice = {}
    for cell in range(1, n + 1):
        choice[(cell, "a")] = add(f"x{cell}a", f"first branch chosen at cell {cell}")
        choice[(cell, "b")] = add(f"x{cell}b", f"second branch chosen at cell {cell}")
    start = add("start", "chooser picks fixed branch or simulation")
    base = add("base", "fixed payoff loop")
    goal = add("goal", "chooser's goal")
    sink = add("sink", "rejection sink")

    # --- actions -----------------------------------------------------------
    sim_actions = tuple(
        f"m_{cell}_{g}_{d}_{r}"
        for cell in range(1, n + 1)
        for g in gamma
        for d in ("R", "L")
        for r in mstates
    ) + ("*", "X")
    action_index = {a: i for i, a in enumerate(sim_actions)}
    star = action_index["*"]
    reject_act = action_index["X"]
    chooser_actions = ("alpha", "beta")
    actions = tuple([sim_actions] * n) + (chooser_actions,)

    # announce states double as actions; the mirror below relies on it
    mirror = {
        action_index[f"m_{cell}_{g}_{d}_{r}"]: announce[(cell, gi, d, ri)]
        for cell in range(1, n + 1)
        for gi, g in enumerate(gamma)
        for d in ("R", "L")
        for ri, r in enumerate(mstates)
    }

    # --- playing function ---------------------------------------------------
    playing: list[tuple[int, ...]] = [()] * len(names)
    for cell in range(1, n + 1):
        playing[plain[cell]] = (cell - 1,)
        playing[exist[cell]] = (chooser,)
        playing[choice[(cell, "a")]] = (cell - 1,)
        playing[choice[(cell, "b")]] = (cell - 1,)
    playing[start] = (chooser,)

    # --- transitions ---------------------------------------------------------
    trans: dict[tuple[int, tuple[int, ...]], dict[int, int]] = {}

    def point(v: int, theta: tuple[int, ...], target: int) -> None:
        trans[(v, theta)] = {target: _FULL}

    for cell in range(1, n + 1):
        for v in (plain[cell], choice[(cell, "a")], choice[(cell, "b")]):
            for a in range(len(sim_actions)):
                if a == star:
                    point(v, (a,), goal)
                elif a == reject_act:
                    point(v, (a,), sink)
                else:
                    point(v, (a,), mirror[a])
        point(exist[cell], (0,), choice[(cell, "a")])  # alpha
        point(exist[cell], (1,), choice[(cell, "b")])  # beta
    for (cell, gi, d, ri), v in announce.items():
        target_cell = cell + 1 if d == "R" else cell - 1
        if not 1 <= target_cell <= n:
            point(v, (), sink)
        elif m.labels[ri] == "or":
            point(v, (), exist[target_cell])
        else:
            point(v, (), plain[target_cell])
    if m.labels[m.init] == "or":
        simulate_entry = exist[1]
    else:
        simulate_entry = plain[1]
    point(start, (0,), base)  # alpha: fixed branch
    point(start, (1,), simulate_entry)  # beta: run the machine
    trans[(base, ())] = {base: _QUARTER, goal: _THREE_QUARTERS}
    point(goal, (), goal)
    point(sink, (), sink)

    horizon = horizon_override if horizon_override is not None else true_horizon(m, n)
    game = GameSystem(
        states=tuple(names),
        init=start,
        actions=actions,
        playing=tuple(playing),
        trans=trans,
        lbits=LBITS,
        goals=tuple([frozenset(range(len(names)))] * n) + (frozenset({goal}),),
        horizon=horizon,
        bound=1,
    )

    transducers = [
        _simulator(m, game, n, cell, announce, choice, action_index)
        for cell in range(1, n + 1)
    ]
    transducers.append(_chooser(game, chooser))
    return CompiledInstance(game=game, transducers=transducers, provenance=provenance)


def _simulator(
    m: ATM,
    game: GameSystem,
    n: int,
    cell: int,
    announce: dict[tuple[int, int, str, int], int],
    choice: dict[tuple[int, str], int],
    action_index: dict[str, int],
) -> StrategyTransducer:
    """The cell-tracking strategy for simulator agent ``cell`` (1-based)."""
    gamma = m.alphabet
    no_state = len(m.mstates)  # padding value: head not on this cell
    marks = ("a", "b", "-")

    tstates: list[str] = []
    index: dict[tuple[int, int, str], int] = {}
    for gi, g in enumerate(gamma):
        for ri in range(len(m.mstates) + 1):
            rname = m.mstates[ri] if ri < no_state else "-"
            for mark in marks:
                index[(gi, ri, mark)] = len(tstates)
                tstates.append(f"q_{g}_{rname}_{mark}")

    rev_announce = {v: key for key, v in announce.items()}
    rev_choice = {v: key for key, v in choice.items()}
    active_states = {
        game.state_index(f"p{cell}"),
        game.state_index(f"x{cell}a"),
        game.state_index(f"x{cell}b"),
    }

    delta: dict[tuple[int, int], int] = {}
    output: dict[tuple[int, int], dict[int, int] | None] = {}
    for (gi, ri, mark), s in index.items():
        for v in range(game.num_states):
            delta[(s, v)] = index[_step(m, n, cell, gi, ri, mark, v,
                                        rev_announce, rev_choice)]
            if v in active_states:
                output[(s, v)] = _emit(m, cell, gi, ri, v, rev_choice,
                                       action_index)
            else:
                output[(s, v)] = None

    init = index[(m.blank, m.init if cell == 1 else no_state, "-")]
    return StrategyTransducer(
        agent=cell - 1,
        tstates=tuple(tstates),
        init=init,
        delta=delta,
        output=output,
        lbits=LBITS,
    )


def _step(
    m: ATM,
    n: int,
    cell: int,
    gi: int,
    ri: int,
    mark: str,
    v: int,
    rev_announce: dict[int, tuple[int, int, str, int]],
    rev_choice: dict[int, tuple[int, str]],
) -> tuple[int, int, str]:
    """Deterministic state update of a simulator on reading game state ``v``."""
    no_state = len(m.mstates)
    if v in rev_announce:
        src_cell, wrote, d, new_r = rev_announce[v]
        new_gi = wrote if src_cell == cell else gi
        target_cell = src_cell + 1 if d == "R" else src_cell - 1
        new_ri = new_r if target_cell == cell else no_state
        return (new_gi, new_ri, "-")  # a move always clears the branch mark
    if v in rev_choice:
        target_cell, which = rev_choice[v]
        if target_cell == cell:
            return (gi, ri, which)
        return (gi, ri, mark)
    return (gi, ri, mark)


def _emit(
    m: ATM,
    cell: int,
    gi: int,
    ri: int,
    v: int,
    rev_choice: dict[int, tuple[int, str]],
    action_index: dict[str, int],
) -> dict[int, int]:
    """Output distribution of a simulator where it is active.

    The branch choice is taken from the observed game state, not from the
    stored mark: the mark is only registered when the choice state is read,
    which happens together with the transition this very output drives.
    Head-absent and unsynchronized combinations emit the rejecting action;
    they are never consulted while every simulator follows the profile.
    """
    no_state = len(m.mstates)
    reject = {action_index["X"]: _FULL}
    if ri == no_state:
        return dict(reject)
    label = m.labels[ri]
    if label == "acc":
        return {action_index["*"]: _FULL}
    if label == "rej":
        return dict(reject)
    succs = m.rules[(ri, gi)]

    def act(rule: Rule) -> int:
        nxt, wsym, d = rule
        return action_index[
            f"m_{cell}_{m.alphabet[wsym]}_{d}_{m.mstates[nxt]}"
        ]

    if label == "det":
        return {act(succs[0]): _FULL}
    if label == "and":
        dist: dict[int, int] = {}
        for rule in succs:
            a = act(rule)
            dist[a] = dist.get(a, 0) + _HALF
        return dist
    # existential: which successor depends on the chooser's recorded pick
    if v in rev_choice:
        _, which = rev_choice[v]
        return {act(succs[0] if which == "a" else succs[1]): _FULL}
    return dict(reject)


def _chooser(game: GameSystem, chooser: int) -> StrategyTransducer:
    """The constant strategy of agent n+1: always the first action."""
    delta = {(0, v): 0 for v in range(game.num_states)}
    output: dict[tuple[int, int], dict[int, int] | None] = {}
    for v in range(game.num_states):
        if chooser in game.playing[v]:
            output[(0, v)] = {0: _FULL}  # alpha
        else:
            output[(0, v)] = None
    return StrategyTransducer(
        agent=chooser,
        tstates=("t",),
        init=0,
        delta=delta,
        output=output,
        lbits=LBITS,
    )


# --- direct machine semantics, for cross-checking the reduction -------------

ID = tuple[int, int, tuple[int, ...]]  # (head cell 1-based, machine state, tape)


def atm_accepts(m: ATM, n: int, cap: int = 100_000) -> bool:
    """Decide acceptance of the empty tape within ``n`` cells.

    Accepting states accept; rejecting states and out-of-bounds moves
    reject; existential states need one accepting successor, universal
    states need both.  Each branch cuts off on a repeated snapshot: a
    minimal accepting computation tree never repeats one on a branch, so
    the cutoff is sound and complete.
    """
    problems = validate_atm(m)
    if problems:
        raise ValueError("invalid machine: " + "; ".join(problems))
    total_ids = n * len(m.mstates) * len(m.alphabet) ** n
    if total_ids > cap:
        raise CapExceeded(cap, "machine snapshots")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * total_ids + 100))

    initial: ID = (1, m.init, tuple([m.blank] * n))

    def successors(ident: ID) -> Iterable[ID | None]:
        head, r, tape = ident
        for nxt, wsym, d in m.rules[(r, tape[head - 1])]:
            new_tape = tape[: head - 1] + (wsym,) + tape[head:]
            new_head = head + 1 if d == "R" else head - 1
            if not 1 <= new_head <= n:
                yield None  # out of bounds: this successor rejects
            else:
                yield (new_head, nxt, new_tape)

    def accepted(ident: ID, seen: frozenset[ID]) -> bool:
        head, r, tape = ident
        label = m.labels[r]
        if label == "acc":
            return True
        if label == "rej":
            return False
        seen = seen | {ident}

        def branch(succ: ID | None) -> bool:
            if succ is None or succ in seen:
                return False
            return accepted(succ, seen)

        results = [branch(succ) for succ in successors(ident)]
        if label == "and":
            return all(results)
        if label == "or":
            return any(results)
        return results[0]  # deterministic

    return accepted(initial, frozenset())
