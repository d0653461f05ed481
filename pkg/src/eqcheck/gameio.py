"""Line-oriented text formats for games, strategy transducers and machines.

All three formats are plain UTF-8, one declaration per line, with ``#``
comments and blank lines ignored.  Serialization is canonical: identifiers
are emitted in declaration order, transition rows in state-then-action
order, and zero-probability entries are never written, so
``serialize(parse(x))`` is byte-stable.

Game format::

    game lbits=<L> horizon=<decimal or 0b...> bound=<b>
    states <id> ...
    init <id>
    agent <i> actions <a> ... goal [<id> ...]
    play <state>: <agent numbers or ->
    trans <state> [<action> ...] -> <state>:<numerator> ...

Transducer format::

    transducer agent=<i> lbits=<L>
    tstates <id> ...
    init <id>
    step <tstate> <game-state> -> <tstate>
    out <tstate> <game-state> -> <action>:<numerator> ... | bot

Machine format::

    atm
    mstates <id>:<acc|rej|or|and|det> ...
    init <id>
    alphabet <sym> ... blank=<sym>
    rule <state> <sym> -> <state> <sym> <R|L> [| <state> <sym> <R|L>]
"""

from __future__ import annotations

import re

from .atm import ATM, LABELS
from .model import DyadicProb, GameSystem
from .strategy import StrategyTransducer


class ParseError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _keyval(token: str, key: str, no: int) -> str:
    if not token.startswith(key + "="):
        raise ParseError(no, f"expected {key}=<value>, got {token!r}")
    return token[len(key) + 1:]


def _int(raw: str, no: int, what: str) -> int:
    try:
        return int(raw, 2) if raw.startswith("0b") else int(raw)
    except ValueError:
        raise ParseError(no, f"{what}: not a number: {raw!r}") from None


def _index(table: dict[str, int], name: str, no: int, what: str) -> int:
    if name not in table:
        raise ParseError(no, f"unknown {what} {name!r}")
    return table[name]


def _pairs(tokens: list[str], table: dict[str, int], one: int, no: int,
           what: str) -> dict[int, int]:
    """Parse ``name:numerator`` tokens into an index-keyed distribution."""
    dist: dict[int, int] = {}
    for token in tokens:
        if ":" not in token:
            raise ParseError(no, f"expected {what}:<numerator>, got {token!r}")
        name, raw = token.rsplit(":", 1)
        idx = _index(table, name, no, what)
        num = _int(raw, no, "numerator")
        if not 0 <= num <= one:
            raise ParseError(no, f"probability out of range: {token!r}")
        if idx in dist:
            raise ParseError(no, f"duplicate entry for {name!r}")
        if num:
            dist[idx] = num
    return dist


def parse_game(text: str) -> GameSystem:
    """Parse a game description; raises :class:`ParseError` on bad syntax.

    Structural faults that are legal syntax (missing transition rows,
    bad row sums) are left for :func:`eqcheck.model.validate_game`.
    """
    lines = _lines(text)
    if not lines or not lines[0][1].startswith("game "):
        raise ParseError(lines[0][0] if lines else 1, "expected game header")
    no, header = lines[0]
    tokens = header.split()
    if len(tokens) != 4:
        raise ParseError(no, "game header needs lbits, horizon and bound")
    lbits = _int(_keyval(tokens[1], "lbits", no), no, "lbits")
    horizon = _int(_keyval(tokens[2], "horizon", no), no, "horizon")
    bound = _int(_keyval(tokens[3], "bound", no), no, "bound")
    if lbits < 1:
        raise ParseError(no, f"lbits must be positive, got {lbits}")

    states: list[str] = []
    state_idx: dict[str, int] = {}
    init: int | None = None
    agents: list[tuple[tuple[str, ...], frozenset[int]]] = []
    playing: dict[int, tuple[int, ...]] = {}
    trans: dict[tuple[int, tuple[int, ...]], dict[int, int]] = {}

    for no, line in lines[1:]:
        tokens = line.split()
        head = tokens[0]
        if head == "states":
            if states:
                raise ParseError(no, "duplicate states line")
            for name in tokens[1:]:
                if name in state_idx:
                    raise ParseError(no, f"duplicate state {name!r}")
                state_idx[name] = len(states)
                states.append(name)
            if not states:
                raise ParseError(no, "at least one state required")
        elif head == "init":
            if len(tokens) != 2:
                raise ParseError(no, "init takes one state")
            init = _index(state_idx, tokens[1], no, "state")
        elif head == "agent":
            if len(tokens) < 4 or tokens[2] != "actions":
                raise ParseError(no, "expected: agent <i> actions ... goal ...")
            number = _int(tokens[1], no, "agent number")
            if number != len(agents) + 1:
                raise ParseError(
                    no, f"agents must be declared in order; expected "
                    f"{len(agents) + 1}, got {number}"
                )
            if "goal" not in tokens[3:]:
                raise ParseError(no, "agent line is missing the goal keyword")
            split = tokens.index("goal", 3)
            acts = tuple(tokens[3:split])
            if not acts:
                raise ParseError(no, "agent declares no actions")
            if len(set(acts)) != len(acts):
                raise ParseError(no, "duplicate action identifier")
            goal = frozenset(
                _index(state_idx, name, no, "state") for name in tokens[split + 1:]
            )
            agents.append((acts, goal))
        elif head == "play":
            if len(tokens) < 2 or not tokens[1].endswith(":"):
                raise ParseError(no, "expected: play <state>: <agents or ->")
            v = _index(state_idx, tokens[1][:-1], no, "state")
            if v in playing:
                raise ParseError(no, f"duplicate play line for {tokens[1][:-1]!r}")
            if tokens[2:] == ["-"]:
                playing[v] = ()
            else:
                nums = sorted(_int(t, no, "agent number") for t in tokens[2:])
                if any(i < 1 or i > len(agents) for i in nums):
                    raise ParseError(no, "agent number out of range in play line")
                if len(set(nums)) != len(nums):
                    raise ParseError(no, "duplicate agent in play line")
                playing[v] = tuple(i - 1 for i in nums)
        elif head == "trans":
            match = re.match(r"trans\s+(\S+)\s+\[([^\]]*)\]\s+->\s+(.*)$", line)
            if not match:
                raise ParseError(no, "expected: trans <state> [<actions>] -> ...")
            v = _index(state_idx, match.group(1), no, "state")
            if v not in playing:
                raise ParseError(
                    no, f"state {match.group(1)!r} needs its play line "
                    f"before its transition rows"
                )
            action_names = match.group(2).split()
            active = playing[v]
            if len(action_names) != len(active):
                raise ParseError(
                    no, f"action tuple has {len(action_names)} entries for "
                    f"{len(active)} active agents"
                )
            theta = tuple(
                _index(
                    {a: j for j, a in enumerate(agents[i][0])},
                    name, no, f"agent {i + 1} action",
                )
                for i, name in zip(active, action_names)
            )
            if (v, theta) in trans:
                raise ParseError(no, "duplicate transition row")
            trans[(v, theta)] = _pairs(
                match.group(3).split(), state_idx, 1 << lbits, no, "state"
            )
        else:
            raise ParseError(no, f"unknown directive {head!r}")

    last = lines[-1][0] if lines else 1
    if not states:
        raise ParseError(last, "missing states line")
    if init is None:
        raise ParseError(last, "missing init line")
    if not agents:
        raise ParseError(last, "missing agent lines")
    missing = [states[v] for v in range(len(states)) if v not in playing]
    if missing:
        raise ParseError(last, f"missing play line for {missing[0]!r}")
    return GameSystem(
        states=tuple(states),
        init=init,
        actions=tuple(acts for acts, _ in agents),
        playing=tuple(playing[v] for v in range(len(states))),
        trans=trans,
        lbits=lbits,
        goals=tuple(goal for _, goal in agents),
        horizon=horizon,
        bound=bound,
    )


def serialize_game(g: GameSystem) -> str:
    out = [f"game lbits={g.lbits} horizon={g.horizon} bound={g.bound}"]
    out.append("states " + " ".join(g.states))
    out.append(f"init {g.states[g.init]}")
    for i, acts in enumerate(g.actions):
        goal = " ".join(g.states[v] for v in sorted(g.goals[i]))
        out.append(
            f"agent {i + 1} actions " + " ".join(acts)
            + " goal" + (f" {goal}" if goal else "")
        )
    for v in range(g.num_states):
        active = " ".join(str(i + 1) for i in g.playing[v]) or "-"
        out.append(f"play {g.states[v]}: {active}")
    for v in range(g.num_states):
        for theta in g.theta_space(v):
            row = g.trans.get((v, theta))
            if row is None:
                continue
            names = " ".join(
                g.actions[i][a] for i, a in zip(g.playing[v], theta)
            )
            entries = " ".join(
                f"{g.states[t]}:{row[t]}" for t in sorted(row) if row[t]
            )
            out.append(f"trans {g.states[v]} [{names}] -> {entries}")
    return "\n".join(out) + "\n"


def parse_transducer(text: str, g: GameSystem) -> StrategyTransducer:
    """Parse one agent's transducer against its game.

    The game supplies the input alphabet (its states), the action set and
    the required bit length; a differing header bit length is the
    "lbits mismatch" error.
    """
    lines = _lines(text)
    if not lines or not lines[0][1].startswith("transducer "):
        raise ParseError(lines[0][0] if lines else 1, "expected transducer header")
    no, header = lines[0]
    tokens = header.split()
    if len(tokens) != 3:
        raise ParseError(no, "transducer header needs agent and lbits")
    agent = _int(_keyval(tokens[1], "agent", no), no, "agent") - 1
    lbits = _int(_keyval(tokens[2], "lbits", no), no, "lbits")
    if not 0 <= agent < g.num_agents:
        raise ParseError(no, f"agent {agent + 1} not in the game")
    if lbits != g.lbits:
        raise ParseError(no, f"lbits mismatch: transducer {lbits}, game {g.lbits}")
    action_idx = {a: j for j, a in enumerate(g.actions[agent])}
    state_idx = {name: v for v, name in enumerate(g.states)}

    tstates: list[str] = []
    tstate_idx: dict[str, int] = {}
    init: int | None = None
    delta: dict[tuple[int, int], int] = {}
    output: dict[tuple[int, int], dict[int, int] | None] = {}

    for no, line in lines[1:]:
        tokens = line.split()
        head = tokens[0]
        if head == "tstates":
            if tstates:
                raise ParseError(no, "duplicate tstates line")
            for name in tokens[1:]:
                if name in tstate_idx:
                    raise ParseError(no, f"duplicate transducer state {name!r}")
                tstate_idx[name] = len(tstates)
                tstates.append(name)
        elif head == "init":
            if len(tokens) != 2:
                raise ParseError(no, "init takes one state")
            init = _index(tstate_idx, tokens[1], no, "transducer state")
        elif head == "step":
            if len(tokens) != 5 or tokens[3] != "->":
                raise ParseError(no, "expected: step <tstate> <state> -> <tstate>")
            key = (
                _index(tstate_idx, tokens[1], no, "transducer state"),
                _index(state_idx, tokens[2], no, "state"),
            )
            if key in delta:
                raise ParseError(no, "duplicate step line")
            delta[key] = _index(tstate_idx, tokens[4], no, "transducer state")
        elif head == "out":
            if len(tokens) < 5 or tokens[3] != "->":
                raise ParseError(no, "expected: out <tstate> <state> -> ...")
            key = (
                _index(tstate_idx, tokens[1], no, "transducer state"),
                _index(state_idx, tokens[2], no, "state"),
            )
            if key in output:
                raise ParseError(no, "duplicate out line")
            if tokens[4:] == ["bot"]:
                output[key] = None
            else:
                output[key] = _pairs(
                    tokens[4:], action_idx, g.one, no, "action"
                )
        else:
            raise ParseError(no, f"unknown directive {head!r}")

    last = lines[-1][0] if lines else 1
    if not tstates:
        raise ParseError(last, "missing tstates line")
    if init is None:
        raise ParseError(last, "missing init line")
    return StrategyTransducer(
        agent=agent,
        tstates=tuple(tstates),
        init=init,
        delta=delta,
        output=output,
        lbits=lbits,
    )


def serialize_transducer(g: GameSystem, t: StrategyTransducer) -> str:
    out = [f"transducer agent={t.agent + 1} lbits={t.lbits}"]
    out.append("tstates " + " ".join(t.tstates))
    out.append(f"init {t.tstates[t.init]}")
    for s in range(t.num_states):
        for v in range(g.num_states):
            if (s, v) in t.delta:
                out.append(
                    f"step {t.tstates[s]} {g.states[v]} -> "
                    f"{t.tstates[t.delta[(s, v)]]}"
                )
    for s in range(t.num_states):
        for v in range(g.num_states):
            if (s, v) not in t.output:
                continue
            dist = t.output[(s, v)]
            if dist is None:
                out.append(f"out {t.tstates[s]} {g.states[v]} -> bot")
            else:
                entries = " ".join(
                    f"{g.actions[t.agent][a]}:{dist[a]}"
                    for a in sorted(dist) if dist[a]
                )
                out.append(f"out {t.tstates[s]} {g.states[v]} -> {entries}")
    return "\n".join(out) + "\n"


def parse_atm(text: str) -> ATM:
    lines = _lines(text)
    if not lines or lines[0][1] != "atm":
        raise ParseError(lines[0][0] if lines else 1, "expected atm header")
    mstates: list[str] = []
    labels: list[str] = []
    mstate_idx: dict[str, int] = {}
    init: int | None = None
    alphabet: list[str] = []
    sym_idx: dict[str, int] = {}
    blank: int | None = None
    rules: dict[tuple[int, int], tuple[tuple[int, int, str], ...]] = {}

    for no, line in lines[1:]:
        tokens = line.split()
        head = tokens[0]
        if head == "mstates":
            for token in tokens[1:]:
                if ":" not in token:
                    raise ParseError(no, f"expected <state>:<label>, got {token!r}")
                name, label = token.split(":", 1)
                if label not in LABELS:
                    raise ParseError(no, f"unknown label {label!r}")
                if name in mstate_idx:
                    raise ParseError(no, f"duplicate machine state {name!r}")
                mstate_idx[name] = len(mstates)
                mstates.append(name)
                labels.append(label)
        elif head == "init":
            init = _index(mstate_idx, tokens[1], no, "machine state")
        elif head == "alphabet":
            if not tokens[1:] or not tokens[-1].startswith("blank="):
                raise ParseError(no, "expected: alphabet <sym>... blank=<sym>")
            for name in tokens[1:-1]:
                if name in sym_idx:
                    raise ParseError(no, f"duplicate symbol {name!r}")
                sym_idx[name] = len(alphabet)
                alphabet.append(name)
            blank = _index(sym_idx, tokens[-1][len("blank="):], no, "symbol")
        elif head == "rule":
            body = line[len("rule"):].strip()
            left, _, right = body.partition("->")
            key_tokens = left.split()
            if len(key_tokens) != 2 or not right.strip():
                raise ParseError(no, "expected: rule <state> <sym> -> ...")
            key = (
                _index(mstate_idx, key_tokens[0], no, "machine state"),
                _index(sym_idx, key_tokens[1], no, "symbol"),
            )
            if key in rules:
                raise ParseError(no, "duplicate rule")
            succs = []
            for part in right.split("|"):
                fields = part.split()
                if len(fields) != 3 or fields[2] not in ("R", "L"):
                    raise ParseError(
                        no, f"expected <state> <sym> <R|L>, got {part.strip()!r}"
                    )
                succs.append((
                    _index(mstate_idx, fields[0], no, "machine state"),
                    _index(sym_idx, fields[1], no, "symbol"),
                    fields[2],
                ))
            rules[key] = tuple(succs)
        else:
            raise ParseError(no, f"unknown directive {head!r}")

    last = lines[-1][0] if lines else 1
    if not mstates:
        raise ParseError(last, "missing mstates line")
    if init is None:
        raise ParseError(last, "missing init line")
    if blank is None:
        raise ParseError(last, "missing alphabet line")
    return ATM(
        mstates=tuple(mstates),
        labels=tuple(labels),
        init=init,
        alphabet=tuple(alphabet),
        blank=blank,
        rules=rules,
    )


def serialize_atm(m: ATM) -> str:
    out = ["atm"]
    out.append(
        "mstates " + " ".join(
            f"{name}:{label}" for name, label in zip(m.mstates, m.labels)
        )
    )
    out.append(f"init {m.mstates[m.init]}")
    out.append(
        "alphabet " + " ".join(m.alphabet) + f" blank={m.alphabet[m.blank]}"
    )
    for (r, sym) in sorted(m.rules):
        succs = " | ".join(
            f"{m.mstates[nxt]} {m.alphabet[wsym]} {d}"
            for nxt, wsym, d in m.rules[(r, sym)]
        )
        out.append(f"rule {m.mstates[r]} {m.alphabet[sym]} -> {succs}")
    return "\n".join(out) + "\n"
