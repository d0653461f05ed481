"""Exact verification of Nash and subgame perfect equilibria in
finite-horizon bounded-concurrency stochastic games, with a compiler from
space-bounded alternating machines to adversarial verifier inputs."""

from .model import (
    CapExceeded,
    DyadicProb,
    GameSystem,
    dyadic_to_rat,
    payoff_of_play,
    validate_game,
)
from .product import ChainState, ReachSet, chain_prob, explore_chain, mdp_actions
from .strategy import (
    ProductTransducer,
    StrategyTransducer,
    advance,
    joint_action_prob,
    substrategy,
    validate_profile,
)
from .values import best_response_values, bit_bound, hitting_probabilities, payoff
from .verify import Verdict, VerdictKind, export_witness, verify_nash, verify_spe

__all__ = [
    "CapExceeded",
    "ChainState",
    "DyadicProb",
    "GameSystem",
    "ProductTransducer",
    "ReachSet",
    "StrategyTransducer",
    "Verdict",
    "VerdictKind",
    "advance",
    "best_response_values",
    "bit_bound",
    "chain_prob",
    "dyadic_to_rat",
    "explore_chain",
    "export_witness",
    "hitting_probabilities",
    "joint_action_prob",
    "mdp_actions",
    "payoff",
    "payoff_of_play",
    "substrategy",
    "validate_game",
    "validate_profile",
    "verify_nash",
    "verify_spe",
]

__version__ = "0.1.0"
