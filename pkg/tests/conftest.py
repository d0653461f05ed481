import pytest

from eqcheck.model import GameSystem
from eqcheck.strategy import ProductTransducer, StrategyTransducer

CAP = 10**6


def const_transducer(g: GameSystem, agent: int, action: int) -> StrategyTransducer:
    """Single-state transducer playing one fixed action wherever active."""
    output = {}
    for v in range(g.num_states):
        if agent in g.playing[v]:
            output[(0, v)] = {action: g.one}
        else:
            output[(0, v)] = None
    return StrategyTransducer(
        agent=agent,
        tstates=("s0",),
        init=0,
        delta={(0, v): 0 for v in range(g.num_states)},
        output=output,
        lbits=g.lbits,
    )


def make_coin_game() -> GameSystem:
    """One agent at u picks a biased coin; g is the goal, F = 2, L = 2."""
    return GameSystem(
        states=("u", "g", "d"),
        init=0,
        actions=(("a", "b"),),
        playing=((0,), (), ()),
        trans={
            (0, (0,)): {1: 3, 2: 1},
            (0, (1,)): {1: 1, 2: 3},
            (1, ()): {1: 4},
            (2, ()): {2: 4},
        },
        lbits=2,
        goals=(frozenset({1}),),
        horizon=2,
        bound=1,
    )


def make_two_step_game() -> tuple[GameSystem, StrategyTransducer]:
    """Optimal from the start, suboptimal in an off-path subgame.

    The agent's first action reaches the goal outright, so the whole-game
    check passes; but the alternative first action leads to a state where
    the profile throws the game away, which only the subgame check sees.
    """
    g = GameSystem(
        states=("v0", "m", "w", "z"),
        init=0,
        actions=(("a", "b"),),
        playing=((0,), (0,), (), ()),
        trans={
            (0, (0,)): {2: 2},  # a: straight to the goal
            (0, (1,)): {1: 2},  # b: detour to m
            (1, (0,)): {2: 2},  # a from m: goal
            (1, (1,)): {3: 2},  # b from m: dead end
            (2, ()): {2: 2},
            (3, ()): {3: 2},
        },
        lbits=1,
        goals=(frozenset({2}),),
        horizon=3,
        bound=1,
    )
    t = StrategyTransducer(
        agent=0,
        tstates=("s0",),
        init=0,
        delta={(0, v): 0 for v in range(4)},
        output={
            (0, 0): {0: 2},  # play a at v0
            (0, 1): {1: 2},  # play b at m: the off-path mistake
            (0, 2): None,
            (0, 3): None,
        },
        lbits=1,
    )
    return g, t


@pytest.fixture
def coin_game() -> GameSystem:
    return make_coin_game()


@pytest.fixture
def always_a(coin_game) -> ProductTransducer:
    return ProductTransducer.of([const_transducer(coin_game, 0, 0)])


@pytest.fixture
def always_b(coin_game) -> ProductTransducer:
    return ProductTransducer.of([const_transducer(coin_game, 0, 1)])


@pytest.fixture
def two_step() -> tuple[GameSystem, StrategyTransducer]:
    return make_two_step_game()
