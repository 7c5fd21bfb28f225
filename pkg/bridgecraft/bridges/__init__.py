"""Bridges: the generic contract, the decryption-circuit compiler and the GM -> SYY bridge."""

from bridgecraft.bridges.base import BOTTOM, Bridge, PlaintextEmbedding, check_bridge_correctness, graph_scheme, identity_bridge
from bridgecraft.bridges.gm_syy import compare_eval, gm_syy_bridge, gm_to_syy

__all__ = [
    "BOTTOM",
    "Bridge",
    "PlaintextEmbedding",
    "check_bridge_correctness",
    "graph_scheme",
    "identity_bridge",
    "compare_eval",
    "gm_syy_bridge",
    "gm_to_syy",
]
