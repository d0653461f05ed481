from dataclasses import replace
from fractions import Fraction

import pytest

from eqcheck.gen import gen_random_instance
from eqcheck.model import CapExceeded
from eqcheck.product import (
    ChainState,
    chain_prob,
    explore_chain,
    explore_mdp,
    mdp_actions,
    profile_row,
    relevant_reachable,
)
from eqcheck.strategy import ProductTransducer

from conftest import CAP, const_transducer


class TestChainProb:
    def test_time_mismatch_is_zero(self, coin_game, always_a):
        src = ChainState(0, (0,), 1)
        assert chain_prob(coin_game, always_a, src, ChainState(1, (0,), 3)) == 0

    def test_transducer_mismatch_is_zero(self, coin_game, always_a):
        # the only product state is (0,), so fake a different one
        src = ChainState(0, (0,), 1)
        assert chain_prob(coin_game, always_a, src, ChainState(1, (1,), 2)) == 0

    def test_coin_game_row(self, coin_game, always_a):
        src = ChainState(0, (0,), 1)
        assert chain_prob(coin_game, always_a, src, ChainState(1, (0,), 2)) == \
            Fraction(3, 4)
        assert chain_prob(coin_game, always_a, src, ChainState(2, (0,), 2)) == \
            Fraction(1, 4)

    def test_terminal_state_raises(self, coin_game, always_a):
        with pytest.raises(ValueError):
            chain_prob(
                coin_game, always_a, ChainState(1, (0,), 2), ChainState(1, (0,), 3)
            )


class TestExploreChain:
    def test_horizon_one_is_single_state(self, coin_game, always_a):
        g = replace(coin_game, horizon=1)
        reach = explore_chain(g, always_a, CAP)
        assert reach.order == [ChainState(0, (0,), 1)]

    def test_deterministic_instance_is_one_trajectory(self, two_step):
        g, t = two_step
        pt = ProductTransducer.of([t])
        reach = explore_chain(g, pt, CAP)
        assert len(reach) == g.horizon

    def test_coin_game_has_three_states(self, coin_game, always_a):
        reach = explore_chain(coin_game, always_a, CAP)
        assert len(reach) == 3

    def test_cap_refusal(self, coin_game, always_a):
        with pytest.raises(CapExceeded):
            explore_chain(coin_game, always_a, 2)

    def test_huge_horizon_refused_immediately(self, coin_game, always_a):
        g = replace(coin_game, horizon=10**30)
        with pytest.raises(CapExceeded):
            explore_chain(g, always_a, CAP)

    def test_closed_under_positive_successors(self):
        for seed in range(20):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            reach = explore_chain(g, pt, CAP)
            for state in reach.order:
                if state.n >= g.horizon:
                    continue
                row = profile_row(g, pt, state.v, state.s)
                assert sum(row.values()) == 1
                for target in row:
                    succ = ChainState(
                        target,
                        tuple(t.delta[(s, state.v)] for t, s in zip(ts, state.s)),
                        state.n + 1,
                    )
                    assert succ in reach


class TestRelevantReachable:
    def test_root_in_goal_gives_empty_set(self, coin_game, always_a):
        g = replace(coin_game, goals=(frozenset({0}),))
        assert len(relevant_reachable(g, always_a, 0, CAP)) == 0

    def test_profile_reachable_within_relevant_or_goal(self):
        for seed in range(20):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            chain = explore_chain(g, pt, CAP)
            for agent in range(g.num_agents):
                relevant = relevant_reachable(g, pt, agent, CAP)
                goal = g.goals[agent]
                for state in chain.order:
                    if state in relevant:
                        continue
                    # not relevant: some ancestor (or itself) touched the goal
                    cur = state
                    touched = False
                    while cur is not None:
                        if cur.v in goal:
                            touched = True
                            break
                        cur = chain.parent[cur]
                    assert touched

    def test_witness_paths_avoid_goal(self):
        for seed in range(20):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            for agent in range(g.num_agents):
                relevant = relevant_reachable(g, pt, agent, CAP)
                for state in relevant.order:
                    path = relevant.witness_history(state)
                    assert all(v not in g.goals[agent] for v in path)
                    assert path[0] == g.init
                    assert path[-1] == state.v
                    assert len(path) == state.n


class TestMdpActions:
    def test_inactive_agent_single_row(self, coin_game, always_a):
        state = ChainState(1, (0,), 1)
        g = replace(coin_game, horizon=3)
        rows = mdp_actions(g, always_a, state, 0)
        assert len(rows) == 1 and rows[0][0] is None
        assert rows[0][1] == profile_row(g, always_a, 1, (0,))

    def test_coin_game_rows(self, coin_game, always_b):
        rows = mdp_actions(coin_game, always_b, ChainState(0, (0,), 1), 0)
        assert rows == [
            (0, {1: Fraction(3, 4), 2: Fraction(1, 4)}),
            (1, {1: Fraction(1, 4), 2: Fraction(3, 4)}),
        ]

    def test_rows_sum_to_one(self):
        for seed in range(20):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            reach = explore_chain(g, pt, CAP)
            for agent in range(g.num_agents):
                for state in reach.order:
                    if state.n >= g.horizon:
                        continue
                    for _, row in mdp_actions(g, pt, state, agent):
                        assert sum(row.values()) == 1

    def test_profile_row_is_output_mixture_of_rows(self):
        # restates the deviation construction as a checkable identity
        for seed in range(20):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            reach = explore_chain(g, pt, CAP)
            for agent in range(g.num_agents):
                for state in reach.order:
                    if state.n >= g.horizon or agent not in g.playing[state.v]:
                        continue
                    out = ts[agent].dist(state.s[agent], state.v)
                    mixed: dict[int, Fraction] = {}
                    for action, row in mdp_actions(g, pt, state, agent):
                        w = Fraction(out.get(action, 0), g.one)
                        for target, p in row.items():
                            mixed[target] = mixed.get(target, Fraction(0)) + w * p
                    direct = profile_row(g, pt, state.v, state.s)
                    assert {t: p for t, p in mixed.items() if p} == direct

    def test_explore_mdp_contains_chain(self):
        for seed in range(10):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            chain = explore_chain(g, pt, CAP)
            for agent in range(g.num_agents):
                mdp = explore_mdp(g, pt, agent, CAP)
                assert all(state in mdp for state in chain.order)
