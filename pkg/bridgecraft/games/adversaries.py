"""Concrete adversaries used as statistical controls and in reductions."""

import logging
import random
from typing import Any, Callable, Dict, Optional, Tuple

import gmpy2

from bridgecraft.bridges.base import Bridge, BridgePublicKey, GraphCiphertext
from bridgecraft.errors import AdversaryError
from bridgecraft.games.ind_cpa import Adversary, EncryptionOracle
from bridgecraft.schemes.base import KnowledgePublicKey
from bridgecraft.schemes.gm import GmCiphertext, GmPublicKey
from bridgecraft.schemes.mockfhe import MockCiphertext
from bridgecraft.utils.numtheory import legendre
from bridgecraft.utils.streams import Rng, derive_seed

logger = logging.getLogger("bridgecraft.games.adversaries")

FACTORING_BOUND = 1 << 20


def _first_component(pk: Any) -> Any:
    while True:
        if isinstance(pk, KnowledgePublicKey):
            pk = pk.base
        elif isinstance(pk, BridgePublicKey):
            pk = pk.pk1
        else:
            return pk


class RandomGuessAdversary(Adversary):
    name = "random"

    def __init__(self, messages: Tuple[Any, Any] = (0, 1)):
        self.messages = messages

    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[Any, Any]:
        return self.messages

    def guess(self, challenge: Any, rng: Rng) -> int:
        return rng.getrandbits(1)


def trial_division(n: int, bound: int = FACTORING_BOUND) -> Optional[int]:
    """Smallest odd prime factor of ``n`` below ``bound``, if any."""
    limit = min(bound, int(gmpy2.isqrt(n)))
    p = 3
    while p <= limit:
        if n % p == 0:
            return p
        p = int(gmpy2.next_prime(p))
    return None


class GmFactoringAdversary(Adversary):
    """Factors a small GM modulus, then decrypts the challenge with Legendre symbols."""

    name = "gm-factoring"

    def __init__(self, bound: int = FACTORING_BOUND):
        self.bound = bound
        self.p: Optional[int] = None

    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[int, int]:
        pk = _first_component(pk)
        if not isinstance(pk, GmPublicKey):
            raise AdversaryError(f"{self.name} needs a GM public key, got {type(pk).__name__}")
        self.p = trial_division(pk.n, self.bound)
        if self.p is None:
            logger.debug(f"No factor of a {pk.n.bit_length()}-bit modulus below {self.bound}")
        return 0, 1

    def guess(self, challenge: Any, rng: Rng) -> int:
        if isinstance(challenge, GraphCiphertext):
            challenge = challenge.c1
        if not isinstance(challenge, GmCiphertext):
            raise AdversaryError(f"{self.name} expected a GM ciphertext")
        if self.p is None:
            return rng.getrandbits(1)
        return 0 if legendre(challenge.value, self.p) == 1 else 1


class TransparentAdversary(Adversary):
    """Reads the plaintext a mock ciphertext carries in the clear."""

    name = "transparent"

    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[int, int]:
        return 0, 1

    def guess(self, challenge: Any, rng: Rng) -> int:
        if isinstance(challenge, GraphCiphertext):
            challenge = challenge.c1
        if not isinstance(challenge, MockCiphertext):
            raise AdversaryError(f"{self.name} expected a mock ciphertext")
        return int(challenge.plaintext == 1)


class SecondComponentAdversary(Adversary):
    """Against a graph scheme with a mock target: reads the bridged component."""

    name = "second-component"

    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[int, int]:
        return 0, 1

    def guess(self, challenge: Any, rng: Rng) -> int:
        if not isinstance(challenge, GraphCiphertext) or not isinstance(challenge.c2, MockCiphertext):
            raise AdversaryError(f"{self.name} needs a graph ciphertext with a mock second component")
        return int(challenge.c2.plaintext == 1)


class _ProjectedOracle:
    def __init__(self, oracle: EncryptionOracle):
        self._oracle = oracle
        self.public_info = None

    def __call__(self, m: Any) -> Any:
        return self._oracle(m).c1


class FirstComponentAdversary(Adversary):
    """Plays a source-scheme adversary against a graph scheme by ignoring c2."""

    def __init__(self, inner: Adversary):
        self.inner = inner
        self.name = f"first-component({inner.name})"

    def reseed(self, trial_seed: int) -> None:
        self.inner.reseed(trial_seed)

    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[Any, Any]:
        if isinstance(pk, EncryptionOracle):
            return self.inner.choose(level, _ProjectedOracle(pk), rng)
        return self.inner.choose(level, _first_component(pk), rng)

    def guess(self, challenge: Any, rng: Rng) -> int:
        if isinstance(challenge, GraphCiphertext):
            challenge = challenge.c1
        return self.inner.guess(challenge, rng)


class _GraphOracle:
    def __init__(self, oracle: EncryptionOracle, bridge: Bridge, public: BridgePublicKey, f_rng: Rng):
        self._oracle = oracle
        self._bridge = bridge
        self._public = public
        self._f_rng = f_rng
        self.public_info = public

    def __call__(self, m: Any) -> GraphCiphertext:
        a = self._oracle(m)
        b = self._oracle(m)
        return GraphCiphertext(a, self._bridge.map_f(self._public, b, self._f_rng))


class KnowledgeReductionAdversary(Adversary):
    """Turns a graph-scheme adversary into a two-challenge adversary on S[K].

    Given the challenge pair (c, c'), it hands (c, f(bk, c')) to the inner
    adversary, which then sees exactly what the graph game would show it.
    """

    def __init__(self, inner: Adversary, bridge: Bridge, seed: int = 0):
        self.inner = inner
        self.bridge = bridge
        self.name = f"reduction({inner.name})"
        self._seed = seed
        # private coins for f, kept apart from the inner adversary's stream
        self._f_rng = random.Random(seed)
        self._public: Optional[BridgePublicKey] = None

    def reseed(self, trial_seed: int) -> None:
        self._f_rng = random.Random(derive_seed(self._seed, trial_seed))
        self.inner.reseed(trial_seed)

    def choose(self, level: int, pk: Any, rng: Rng) -> Tuple[Any, Any]:
        if isinstance(pk, EncryptionOracle):
            knowledge = pk.public_info
            self._public = BridgePublicKey(None, knowledge.pk2, knowledge.bk)
            handle = _GraphOracle(pk, self.bridge, self._public, self._f_rng)
            return self.inner.choose(level, handle, rng)
        if not isinstance(pk, KnowledgePublicKey):
            raise AdversaryError(f"{self.name} needs a public key carrying bridge knowledge")
        self._public = BridgePublicKey(pk.base, pk.knowledge.pk2, pk.knowledge.bk)
        return self.inner.choose(level, self._public, rng)

    def guess(self, challenge: Any, rng: Rng) -> int:
        if not isinstance(challenge, tuple) or len(challenge) != 2:
            raise AdversaryError(f"{self.name} expects two challenge ciphertexts")
        c, c_prime = challenge
        bridged = self.bridge.map_f(self._public, c_prime, self._f_rng)
        return self.inner.guess(GraphCiphertext(c, bridged), rng)


ADVERSARIES: Dict[str, Callable[[], Adversary]] = {
    "random": RandomGuessAdversary,
    "gm-factoring": GmFactoringAdversary,
    "transparent": TransparentAdversary,
    "second-component": SecondComponentAdversary,
    "first-component": lambda: FirstComponentAdversary(GmFactoringAdversary()),
}


def make_adversary(name: str) -> Adversary:
    try:
        return ADVERSARIES[name]()
    except KeyError:
        raise AdversaryError(f"unknown adversary {name!r}; choose from {sorted(ADVERSARIES)}")
