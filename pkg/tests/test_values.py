from dataclasses import replace
from fractions import Fraction

import pytest

from eqcheck.gen import gen_random_instance
from eqcheck.oracle import oracle_payoff
from eqcheck.product import ChainState, explore_chain, explore_mdp
from eqcheck.strategy import ProductTransducer
from eqcheck.values import (
    best_response_values,
    bit_bound,
    denominator_exponent,
    format_value_table,
    hitting_probabilities,
    payoff,
)

from conftest import CAP, const_transducer


class TestHittingProbabilities:
    def test_terminal_goal_state_is_one(self, coin_game, always_a):
        reach = explore_chain(coin_game, always_a, CAP)
        table = hitting_probabilities(coin_game, always_a, 0, reach)
        assert table[ChainState(1, (0,), 2)] == 1
        assert table[ChainState(2, (0,), 2)] == 0

    def test_coin_game_initial_value(self, coin_game, always_a):
        reach = explore_chain(coin_game, always_a, CAP)
        table = hitting_probabilities(coin_game, always_a, 0, reach)
        assert table[reach.root] == Fraction(3, 4)

    def test_values_within_unit_interval(self):
        for seed in range(30):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            reach = explore_chain(g, pt, CAP)
            for agent in range(g.num_agents):
                for value in hitting_probabilities(g, pt, agent, reach).values():
                    assert 0 <= value <= 1

    def test_matches_forward_enumeration(self):
        # backwards induction must reproduce the play-tree semantics exactly
        for seed in range(40):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            for agent in range(g.num_agents):
                assert payoff(g, pt, agent, CAP) == oracle_payoff(g, ts, agent)


class TestPayoff:
    def test_goal_everywhere_is_one(self, coin_game, always_b):
        g = replace(coin_game, goals=(frozenset({0, 1, 2}),))
        assert payoff(g, always_b, 0, CAP) == 1

    def test_empty_goal_is_zero(self, coin_game, always_a):
        g = replace(coin_game, goals=(frozenset(),))
        assert payoff(g, always_a, 0, CAP) == 0

    def test_coin_game_always_b(self, coin_game, always_b):
        assert payoff(coin_game, always_b, 0, CAP) == Fraction(1, 4)


class TestBestResponseValues:
    def test_never_active_agent_equals_profile_values(self):
        for seed in range(20):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            chain = explore_chain(g, pt, CAP)
            for agent in range(g.num_agents):
                if any(agent in g.playing[v] for v in range(g.num_states)):
                    continue
                mdp = explore_mdp(g, pt, agent, CAP)
                table = hitting_probabilities(g, pt, agent, mdp)
                brv = best_response_values(g, pt, agent, mdp)
                assert all(brv[s][0] == table[s] for s in mdp.order)

    def test_coin_game_best_response_to_b(self, coin_game, always_b):
        mdp = explore_mdp(coin_game, always_b, 0, CAP)
        value, action = best_response_values(coin_game, always_b, 0, mdp)[mdp.root]
        assert value == Fraction(3, 4)
        assert action == 0  # the first-declared action achieves the optimum

    def test_dominates_profile_values(self):
        for seed in range(30):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            for agent in range(g.num_agents):
                mdp = explore_mdp(g, pt, agent, CAP)
                table = hitting_probabilities(g, pt, agent, mdp)
                brv = best_response_values(g, pt, agent, mdp)
                assert all(brv[s][0] >= table[s] for s in mdp.order)

    def test_slice_order_does_not_matter(self, coin_game, always_b):
        # identical values whichever way a slice is enumerated: rerun on a
        # reversed exploration order and compare
        mdp = explore_mdp(coin_game, always_b, 0, CAP)
        brv = best_response_values(coin_game, always_b, 0, mdp)
        mdp.order.reverse()
        assert best_response_values(coin_game, always_b, 0, mdp) == brv


class TestBitBound:
    def test_coin_game_bound(self, coin_game, always_a):
        # F=2 slices of (ceil(log2(3*1)) + ceil(log2(2**1)) + (1+1)*2) bits
        assert bit_bound(coin_game, always_a) == 14

    def test_all_computed_denominators_below_bound(self):
        for seed in range(30):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            ceiling = bit_bound(g, pt)
            for agent in range(g.num_agents):
                mdp = explore_mdp(g, pt, agent, CAP)
                for value in hitting_probabilities(g, pt, agent, mdp).values():
                    assert denominator_exponent(value) <= ceiling
                for value, _ in best_response_values(g, pt, agent, mdp).values():
                    assert denominator_exponent(value) <= ceiling

    def test_deterministic_profile_has_integer_values(self, two_step):
        g, t = two_step
        pt = ProductTransducer.of([t])
        reach = explore_chain(g, pt, CAP)
        for value in hitting_probabilities(g, pt, 0, reach).values():
            assert value.denominator == 1

    def test_linear_in_horizon(self, coin_game, always_a):
        doubled = replace(coin_game, horizon=coin_game.horizon * 2)
        assert bit_bound(doubled, always_a) == 2 * bit_bound(coin_game, always_a)


def test_value_table_dump_format(coin_game, always_b):
    reach = explore_chain(coin_game, always_b, CAP)
    table = hitting_probabilities(coin_game, always_b, 0, reach)
    dump = format_value_table(coin_game, always_b, table)
    assert dump.splitlines() == [
        "state u (s0) 1 = 1/4",
        "state g (s0) 2 = 1/1",
        "state d (s0) 2 = 0/1",
    ]
