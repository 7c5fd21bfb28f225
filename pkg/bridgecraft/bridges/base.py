"""Bridges between encryption schemes and the graph scheme attached to each bridge."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

from bridgecraft import config
from bridgecraft.errors import CorrectnessError, ParameterError
from bridgecraft.schemes.base import EncryptionScheme, KeyPair, PlaintextSpace
from bridgecraft.utils.findist import HOEFFDING_LOG_TERM
from bridgecraft.utils.streams import Rng, derive_rng, run_trials

logger = logging.getLogger("bridgecraft.bridges.base")


class _Bottom:
    def __repr__(self) -> str:
        return "BOTTOM"

    def __bool__(self) -> bool:
        return False


BOTTOM = _Bottom()


class PlaintextEmbedding:
    """Injective map from the source plaintexts into the target plaintexts.

    The inverse is tabulated once, which requires finite, hashable plaintexts.
    """

    def __init__(self, source: PlaintextSpace, target: PlaintextSpace, forward: Callable[[Any], Any]):
        self.source = source
        self.target = target
        self._forward = forward
        self._table: Dict[Any, Any] = {}
        for m in source.elements():
            image = forward(m)
            if not target.contains(image):
                raise ParameterError(f"embedding sends {m!r} to {image!r}, outside the target space")
            if image in self._table:
                raise ParameterError(f"embedding is not injective: {m!r} and {self._table[image]!r} collide")
            self._table[image] = m

    @classmethod
    def identity(cls, space: PlaintextSpace) -> "PlaintextEmbedding":
        return cls(space, space, lambda m: m)

    @classmethod
    def bits(cls, source: PlaintextSpace, target: PlaintextSpace) -> "PlaintextEmbedding":
        """Send a plaintext to the tuple of its bits."""
        return cls(source, target, lambda m: tuple(source.encode(m)))

    def __call__(self, m: Any) -> Any:
        self.source.check(m)
        return self._forward(m)

    def inverse(self, x: Any) -> Any:
        """The preimage of ``x``, or ``BOTTOM`` when ``x`` is off the image."""
        try:
            return self._table.get(x, BOTTOM)
        except TypeError:
            return BOTTOM


@dataclass(frozen=True)
class BridgeKeyMaterial:
    sk1: Any
    pk1: Any
    sk2: Any
    pk2: Any
    bk: Any = None

    @property
    def public(self) -> "BridgePublicKey":
        return BridgePublicKey(self.pk1, self.pk2, self.bk)


@dataclass(frozen=True)
class BridgePublicKey:
    """What the bridge map f and graph-scheme encryption get to see."""

    pk1: Any
    pk2: Any
    bk: Any = None


@dataclass(frozen=True)
class Bridge:
    """(iota, bridge-key generator, f) from ``source`` to ``target``.

    Key generation runs in three stages: source keys, then target keys derived
    from the source secret key by ``derive_target``, then the bridge key by
    ``derive_bridge_key``. ``target_secret`` extracts the target scheme's
    secret key from sk2.
    """

    name: str
    source: EncryptionScheme
    target: EncryptionScheme
    embedding: PlaintextEmbedding
    derive_target: Callable[[Any, Any, Rng], KeyPair]
    derive_bridge_key: Callable[[Any, Any, KeyPair, Rng], Any]
    map_f: Callable[[BridgePublicKey, Any, Rng], Any]
    failure_bound: float = 0.0
    target_secret: Callable[[Any], Any] = lambda sk2: sk2

    def extend_keys(self, sk1: Any, pk1: Any, rng: Rng) -> BridgeKeyMaterial:
        """Stages two and three for given source keys."""
        target_keys = self.derive_target(sk1, pk1, rng)
        bk = self.derive_bridge_key(sk1, pk1, target_keys, rng)
        return BridgeKeyMaterial(sk1, pk1, target_keys.sk, target_keys.pk, bk)

    def keygen3(self, rng: Rng, source_keys: Optional[KeyPair] = None) -> BridgeKeyMaterial:
        if source_keys is None:
            source_keys = self.source.keygen(rng)
        material = self.extend_keys(source_keys.sk, source_keys.pk, rng)
        logger.debug(f"Generated bridge keys for {self.name}")
        return material

    def apply(self, public: BridgePublicKey, c: Any, rng: Rng) -> Any:
        return self.map_f(public, c, rng)

    def dec_target(self, sk2: Any, c2: Any) -> Any:
        return self.target.dec(self.target_secret(sk2), c2)


@dataclass(frozen=True)
class GraphSecretKey:
    sk1: Any
    sk2: Any


@dataclass(frozen=True)
class GraphCiphertext:
    c1: Any
    c2: Any


class GraphScheme(EncryptionScheme):
    """Ciphertexts (a, f(bk, b)) for two independent source encryptions a, b of m.

    Decryption reads only the first component.
    """

    def __init__(self, bridge: Bridge):
        super().__init__(bridge.source.plaintext_space, bridge.source.level)
        self.bridge = bridge
        self.name = f"graph({bridge.name})"
        self.symmetric = bridge.source.symmetric
        self.decryption_failure_bound = bridge.source.decryption_failure_bound

    def keygen(self, rng: Rng) -> KeyPair:
        material = self.bridge.keygen3(rng)
        return KeyPair(GraphSecretKey(material.sk1, material.sk2), material.public)

    def enc(self, pk: BridgePublicKey, m: Any, rng: Rng) -> GraphCiphertext:
        a = self.bridge.source.enc(pk.pk1, m, rng)
        b = self.bridge.source.enc(pk.pk1, m, rng)
        return GraphCiphertext(a, self.bridge.map_f(pk, b, rng))

    def dec(self, sk: GraphSecretKey, c: GraphCiphertext) -> Any:
        return self.bridge.source.dec(sk.sk1, c.c1)

    def dec_second(self, sk: GraphSecretKey, c: GraphCiphertext) -> Any:
        return self.bridge.embedding.inverse(self.bridge.dec_target(sk.sk2, c.c2))

    def public_info(self, pk: BridgePublicKey) -> Any:
        return BridgePublicKey(None, pk.pk2, pk.bk)


def graph_scheme(bridge: Bridge) -> GraphScheme:
    return GraphScheme(bridge)


def identity_bridge(scheme: EncryptionScheme) -> Bridge:
    """f(bk, c) = c between two public keys of the same secret key."""

    def derive_target(sk1: Any, pk1: Any, rng: Rng) -> KeyPair:
        return KeyPair(sk1, scheme.public_key(sk1, rng))

    return Bridge(
        name=f"identity-{scheme.name}",
        source=scheme,
        target=scheme,
        embedding=PlaintextEmbedding.identity(scheme.plaintext_space),
        derive_target=derive_target,
        derive_bridge_key=lambda sk1, pk1, target_keys, rng: None,
        map_f=lambda public, c, rng: c,
        failure_bound=scheme.decryption_failure_bound,
    )


@dataclass(frozen=True)
class CorrectnessReport:
    bridge: str
    trials: int
    failures: int
    bound: float
    seed: int

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def half_width(self) -> float:
        return math.sqrt(HOEFFDING_LOG_TERM / (2 * self.trials))

    @property
    def passed(self) -> bool:
        return self.rate <= self.bound + self.half_width

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bridge": self.bridge,
            "trials": self.trials,
            "failures": self.failures,
            "rate": self.rate,
            "half_width": self.half_width,
            "bound": self.bound,
            "passed": self.passed,
            "seed": self.seed,
        }


def check_bridge_correctness(
    bridge: Bridge,
    trials: int,
    rng: Rng,
    block: Optional[int] = None,
    jobs: int = 1,
    strict: bool = False,
) -> CorrectnessReport:
    """Empirical Pr[Dec2(sk2, f(bk, Enc1(pk1, m))) != iota(m)] over uniform m.

    Keys are regenerated for every block of ``block`` trials. With ``strict``
    a failed check raises ``CorrectnessError``.
    """
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    block = block or config.KEYGEN_BLOCK
    seed = rng.getrandbits(64)
    blocks = math.ceil(trials / block)

    def run_block(index: int, block_rng: Rng) -> int:
        count = min(block, trials - index * block)
        material = bridge.keygen3(derive_rng(seed, "keys", index))
        public = material.public
        failures = 0
        for _ in range(count):
            m = bridge.source.plaintext_space.sample(block_rng)
            c1 = bridge.source.enc(material.pk1, m, block_rng)
            c2 = bridge.map_f(public, c1, block_rng)
            if bridge.dec_target(material.sk2, c2) != bridge.embedding(m):
                failures += 1
        return failures

    failures = sum(run_trials(run_block, blocks, seed, f"correctness/{bridge.name}", jobs))
    report = CorrectnessReport(bridge.name, trials, failures, bridge.failure_bound, seed)
    logger.info(f"{bridge.name}: {failures}/{trials} failures (bound {bridge.failure_bound:.3g})")
    if strict and not report.passed:
        raise CorrectnessError(
            f"bridge {bridge.name} failed {failures}/{trials} times, above bound {bridge.failure_bound:.3g}"
        )
    return report
