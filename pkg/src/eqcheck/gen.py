"""Seeded random instances for property suites, and play sampling.

Instances are drawn with :class:`random.Random`, so one seed pins one
instance byte-for-byte.  Distributions are drawn as integer weights and
snapped onto the dyadic grid by largest-remainder assignment, which keeps
every generated row summing to exactly one.

Sampling in :func:`simulate` draws against cumulative numerators with
``randrange``, so even the Monte-Carlo path never touches floating point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import GameSystem
from .strategy import StrategyTransducer


@dataclass(frozen=True)
class GenLimits:
    max_states: int = 5
    max_agents: int = 3
    max_bound: int = 2
    max_actions: int = 2
    max_horizon: int = 5
    max_tstates: int = 3
    max_lbits: int = 3


def largest_remainder(weights: list[int], total: int) -> list[int]:
    """Integer shares of ``total`` proportional to positive ``weights``.

    Floors the exact shares, then hands the leftover units to the largest
    fractional remainders, lowest index first on ties.  The result sums to
    ``total`` exactly.
    """
    if not weights or any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    denom = sum(weights)
    shares = [Fraction(w * total, denom) for w in weights]
    base = [int(s) for s in shares]
    leftover = total - sum(base)
    order = sorted(
        range(len(weights)), key=lambda j: (shares[j] - base[j], -j), reverse=True
    )
    for j in order[:leftover]:
        base[j] += 1
    return base


def _grid_distribution(
    rng: random.Random, keys: list[int], one: int
) -> dict[int, int]:
    """A random exact distribution over a nonempty subset of ``keys``."""
    support = rng.sample(keys, rng.randint(1, len(keys)))
    weights = [rng.randint(1, 8) for _ in support]
    nums = largest_remainder(weights, one)
    return {k: n for k, n in sorted(zip(support, nums)) if n}


def gen_random_instance(
    seed: int, limits: GenLimits = GenLimits()
) -> tuple[GameSystem, list[StrategyTransducer]]:
    """A valid game plus matching profile, deterministic in the seed."""
    rng = random.Random(seed)
    lbits = rng.randint(1, limits.max_lbits)
    one = 1 << lbits
    num_states = rng.randint(1, limits.max_states)
    num_agents = rng.randint(1, limits.max_agents)
    bound = rng.randint(1, min(limits.max_bound, num_agents))
    horizon = rng.randint(1, limits.max_horizon)
    states = tuple(f"v{j}" for j in range(num_states))
    actions = tuple(
        tuple(f"a{j}" for j in range(rng.randint(1, limits.max_actions)))
        for _ in range(num_agents)
    )
    playing = tuple(
        tuple(sorted(rng.sample(range(num_agents), rng.randint(0, bound))))
        for _ in range(num_states)
    )
    goals = tuple(
        frozenset(v for v in range(num_states) if rng.random() < 0.3)
        for _ in range(num_agents)
    )
    g = GameSystem(
        states=states,
        init=0,
        actions=actions,
        playing=playing,
        trans={},
        lbits=lbits,
        goals=goals,
        horizon=horizon,
        bound=bound,
    )
    for v in range(num_states):
        for theta in g.theta_space(v):
            g.trans[(v, theta)] = _grid_distribution(
                rng, list(range(num_states)), one
            )
    profile = [
        _random_transducer(rng, g, i, limits) for i in range(num_agents)
    ]
    return g, profile


def _random_transducer(
    rng: random.Random, g: GameSystem, agent: int, limits: GenLimits
) -> StrategyTransducer:
    size = rng.randint(1, limits.max_tstates)
    tstates = tuple(f"s{j}" for j in range(size))
    delta = {
        (s, v): rng.randrange(size)
        for s in range(size)
        for v in range(g.num_states)
    }
    output: dict[tuple[int, int], dict[int, int] | None] = {}
    for s in range(size):
        for v in range(g.num_states):
            if agent in g.playing[v]:
                output[(s, v)] = _grid_distribution(
                    rng, list(range(len(g.actions[agent]))), g.one
                )
            else:
                output[(s, v)] = None
    return StrategyTransducer(
        agent=agent,
        tstates=tstates,
        init=rng.randrange(size),
        delta=delta,
        output=output,
        lbits=g.lbits,
    )


def _sample(rng: random.Random, dist: dict[int, int], one: int) -> int:
    """Draw a key with probability numerator/one, exactly."""
    x = rng.randrange(one)
    acc = 0
    for key in sorted(dist):
        acc += dist[key]
        if x < acc:
            return key
    raise AssertionError("distribution does not sum to one")


def sample_play(
    rng: random.Random, g: GameSystem, ts: list[StrategyTransducer]
) -> tuple[int, ...]:
    """One play drawn under the profile with exact integer sampling."""
    v = g.init
    svec = tuple(t.init for t in ts)
    play = [v]
    while len(play) < g.horizon:
        theta = tuple(
            _sample(rng, ts[i].dist(svec[i], v), g.one) for i in g.playing[v]
        )
        svec = tuple(t.delta[(si, v)] for t, si in zip(ts, svec))
        v = _sample(rng, g.row(v, theta), g.one)
        play.append(v)
    return tuple(play)


def simulate(
    g: GameSystem, ts: list[StrategyTransducer], seed: int, count: int
) -> list[str]:
    """Sample ``count`` plays; report per-agent goal frequencies as fractions."""
    rng = random.Random(seed)
    hits = [0] * g.num_agents
    for _ in range(count):
        play = sample_play(rng, g, ts)
        for i in range(g.num_agents):
            if any(v in g.goals[i] for v in play):
                hits[i] += 1
    if not count:
        return []
    freqs = [Fraction(h, count) for h in hits]
    return [
        f"SIM agent={i + 1} hits={hits[i]} runs={count} "
        f"freq={freqs[i].numerator}/{freqs[i].denominator}"
        for i in range(g.num_agents)
    ]
