"""IND-CPA security experiments, adversaries and bridge-key hybrids."""

from bridgecraft.games.adversaries import ADVERSARIES, make_adversary
from bridgecraft.games.hybrids import hybrid_fixture, run_key_distinguishing_game
from bridgecraft.games.ind_cpa import (
    Adversary,
    EncryptionOracle,
    bridge_knowledge,
    knowledge_gap,
    run_2ind_cpa,
    run_bridge_game,
    run_ind_cpa,
    run_knowledge_game,
)

__all__ = [
    "ADVERSARIES",
    "Adversary",
    "EncryptionOracle",
    "bridge_knowledge",
    "hybrid_fixture",
    "knowledge_gap",
    "make_adversary",
    "run_2ind_cpa",
    "run_bridge_game",
    "run_ind_cpa",
    "run_key_distinguishing_game",
    "run_knowledge_game",
]
