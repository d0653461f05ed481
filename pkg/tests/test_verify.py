from dataclasses import replace
from fractions import Fraction

from eqcheck.gen import gen_random_instance
from eqcheck.product import ChainState, explore_mdp
from eqcheck.strategy import ProductTransducer
from eqcheck.values import best_response_values
from eqcheck.verify import (
    Verdict,
    VerdictKind,
    Witness,
    export_witness,
    verify_nash,
    verify_spe,
)

from conftest import CAP
from helpers import replay_policy_value, spe_by_subgame_enumeration


class TestVerifyNash:
    def test_coin_game_always_a_is_ne(self, coin_game, always_a):
        assert verify_nash(coin_game, always_a, CAP).kind is VerdictKind.NE_YES

    def test_coin_game_always_b_is_not_ne(self, coin_game, always_b):
        verdict = verify_nash(coin_game, always_b, CAP)
        assert verdict.kind is VerdictKind.NE_NO
        (w,) = verdict.witnesses
        assert w.agent == 0
        assert w.profile_payoff == Fraction(1, 4)
        assert w.deviation_payoff == Fraction(3, 4)

    def test_goal_at_start_skips_agent(self, coin_game, always_b):
        g = replace(coin_game, goals=(frozenset({0}),))
        assert verify_nash(g, always_b, CAP).kind is VerdictKind.NE_YES

    def test_cap_refusal(self, coin_game, always_b):
        verdict = verify_nash(coin_game, always_b, 2)
        assert verdict.kind is VerdictKind.REFUSED
        assert verdict.cap == 2

    def test_witness_payoff_is_replayable(self):
        # the recorded best-response policy must reproduce the claimed value
        for seed in range(40):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            verdict = verify_nash(g, pt, CAP, all_witnesses=True)
            for w in verdict.witnesses:
                mdp = explore_mdp(g, pt, w.agent, CAP)
                brv = best_response_values(g, pt, w.agent, mdp)
                assert brv[mdp.root][0] == w.deviation_payoff
                assert replay_policy_value(g, pt, w.agent, mdp, brv) == \
                    w.deviation_payoff


class TestVerifySpe:
    def test_coin_game_always_a_is_spe(self, coin_game, always_a):
        assert verify_spe(coin_game, always_a, CAP).kind is VerdictKind.SPE_YES

    def test_not_ne_implies_not_spe(self, coin_game, always_b):
        assert verify_spe(coin_game, always_b, CAP).kind is VerdictKind.SPE_NO

    def test_off_path_mistake_found(self, two_step):
        g, t = two_step
        pt = ProductTransducer.of([t])
        assert verify_nash(g, pt, CAP).kind is VerdictKind.NE_YES
        verdict = verify_spe(g, pt, CAP)
        assert verdict.kind is VerdictKind.SPE_NO
        (w,) = verdict.witnesses
        assert w.state == ChainState(1, (0,), 2)  # the off-path state m
        assert w.history == (0, 1)
        assert w.action == 0
        assert (w.profile_payoff, w.deviation_payoff) == (Fraction(0), Fraction(1))

    def test_matches_subgame_enumeration(self, two_step):
        g, t = two_step
        assert spe_by_subgame_enumeration(g, [t]) is False
        for seed in range(25):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            got = verify_spe(g, pt, CAP).kind is VerdictKind.SPE_YES
            assert got == spe_by_subgame_enumeration(g, ts)

    def test_spe_implies_ne(self):
        for seed in range(60):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            if verify_spe(g, pt, CAP).kind is VerdictKind.SPE_YES:
                assert verify_nash(g, pt, CAP).kind is VerdictKind.NE_YES

    def test_deterministic_reports(self, two_step):
        g, t = two_step
        pt = ProductTransducer.of([t])
        first = export_witness(g, pt, verify_spe(g, pt, CAP))
        second = export_witness(g, pt, verify_spe(g, pt, CAP))
        assert first == second


class TestExportWitness:
    def test_not_ne_line(self, coin_game, always_b):
        verdict = verify_nash(coin_game, always_b, CAP)
        assert export_witness(coin_game, always_b, verdict) == \
            "VERDICT NOT_NE agent=1 payoff=1/4 best=3/4"

    def test_not_spe_line(self, two_step):
        g, t = two_step
        pt = ProductTransducer.of([t])
        verdict = verify_spe(g, pt, CAP)
        assert export_witness(g, pt, verdict) == (
            "VERDICT NOT_SPE agent=1 state=m,(s0),2 action=a "
            "old=0/1 new=1/1 history=v0 m"
        )

    def test_fixed_strings(self, coin_game, always_a):
        assert export_witness(
            coin_game, always_a, Verdict(VerdictKind.SPE_YES)
        ) == "VERDICT SPE"
        assert export_witness(
            coin_game, always_a, Verdict(VerdictKind.NE_YES)
        ) == "VERDICT NE"
        assert export_witness(
            coin_game, always_a, Verdict(VerdictKind.REFUSED, cap=99)
        ) == "VERDICT REFUSED cap=99"

    def test_all_witnesses_one_line_each(self):
        for seed in range(60):
            g, ts = gen_random_instance(seed)
            pt = ProductTransducer.of(ts)
            verdict = verify_nash(g, pt, CAP, all_witnesses=True)
            if len(verdict.witnesses) > 1:
                text = export_witness(g, pt, verdict)
                assert len(text.splitlines()) == len(verdict.witnesses)
                return
