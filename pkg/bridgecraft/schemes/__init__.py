"""Encryption schemes: GM, SYY, CSGN and the transparent mock backend."""

from bridgecraft.schemes.base import EncryptionScheme, HomomorphicScheme, KeyPair, KnowledgeWrapped, product_scheme
from bridgecraft.schemes.csgn import CsgnScheme
from bridgecraft.schemes.gm import GmScheme
from bridgecraft.schemes.mockfhe import MockFheScheme
from bridgecraft.schemes.syy import SyyScheme

__all__ = [
    "EncryptionScheme",
    "HomomorphicScheme",
    "KeyPair",
    "KnowledgeWrapped",
    "product_scheme",
    "CsgnScheme",
    "GmScheme",
    "MockFheScheme",
    "SyyScheme",
]
