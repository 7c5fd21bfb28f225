"""Hybrid distributions between the all-zero bridge key and the true one.

Hybrid i encrypts the first i secret-key bits of the source scheme under the
target key and a fixed bit (zero by default) in every later slot. Hybrid 0 can
be sampled from the source public key alone; hybrid e is the real bridge key.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence, Tuple

from bridgecraft.bridges.base import Bridge
from bridgecraft.errors import ParameterError
from bridgecraft.schemes.base import EncryptionScheme, HomomorphicScheme
from bridgecraft.utils.findist import GameReport, Sampler, estimate_advantage
from bridgecraft.utils.streams import Rng, derive_rng

logger = logging.getLogger("bridgecraft.games.hybrids")


@dataclass(frozen=True)
class HybridSample:
    pk_source: Any
    pk_target: Any
    bk: Tuple[Any, ...]


def key_width(source: EncryptionScheme) -> int:
    """Number of secret-key bits the source exposes."""
    probe = source.keygen(derive_rng(0, "key-width"))
    return len(source.secret_key_bits(probe.sk))


class HybridSampler:
    def __init__(
        self,
        source: EncryptionScheme,
        target: HomomorphicScheme,
        index: int,
        width: int,
        fixed_bits: Sequence[int],
    ):
        self.source = source
        self.target = target
        self.index = index
        self.width = width
        self.fixed_bits = tuple(fixed_bits)

    def _target_keys(self, rng: Rng) -> Tuple[Any, Any, Any]:
        keys = self.target.keygen(rng)
        enc_key = keys.sk if self.target.symmetric else keys.pk
        return keys.sk, keys.pk, enc_key

    def sample_with_secrets(self, rng: Rng) -> Tuple[HybridSample, Any, Any]:
        """Draw (sample, sk_source, sk_target)."""
        source_keys = self.source.keygen(rng)
        sk_bits = self.source.secret_key_bits(source_keys.sk)
        if len(sk_bits) != self.width:
            raise ParameterError(f"source key has {len(sk_bits)} bits, expected {self.width}")
        sk_target, pk_target, enc_key = self._target_keys(rng)
        slots = [sk_bits[j] if j < self.index else self.fixed_bits[j] for j in range(self.width)]
        bk = tuple(self.target.enc(enc_key, bit, rng) for bit in slots)
        return HybridSample(source_keys.pk, pk_target, bk), source_keys.sk, sk_target

    def sample(self, rng: Rng) -> HybridSample:
        return self.sample_with_secrets(rng)[0]

    def sample_fiber(self, rng: Rng, pk_source: Any) -> HybridSample:
        """Hybrid 0 conditioned on a given source public key."""
        if self.index != 0:
            raise ParameterError(f"hybrid {self.index} depends on the source secret key")
        _, pk_target, enc_key = self._target_keys(rng)
        bk = tuple(self.target.enc(enc_key, bit, rng) for bit in self.fixed_bits)
        return HybridSample(pk_source, pk_target, bk)

    @property
    def sampler(self) -> Sampler:
        fiber = self.sample_fiber if self.index == 0 else None
        return Sampler(draw=self.sample, fiber=fiber)


def hybrid_fixture(
    source: EncryptionScheme,
    target: HomomorphicScheme,
    i: int,
    fixed_bits: Optional[Sequence[int]] = None,
    width: Optional[int] = None,
) -> HybridSampler:
    """Sampler of (pk_source, pk_target, bk) for hybrid ``i``, 0 <= i <= e."""
    e = width if width is not None else key_width(source)
    if not 0 <= i <= e:
        raise ParameterError(f"hybrid index {i} outside [0, {e}]")
    if fixed_bits is None:
        fixed_bits = (0,) * e
    if len(fixed_bits) != e or any(b not in (0, 1) for b in fixed_bits):
        raise ParameterError(f"fixed_bits must be {e} bits")
    logger.debug(f"Hybrid {i}/{e} for {source.name} -> {target.name}")
    return HybridSampler(source, target, i, e, fixed_bits)


def run_key_distinguishing_game(
    bridge: Bridge,
    distinguisher: Callable[[HybridSample], int],
    trials: int,
    rng: Rng,
    jobs: int = 1,
) -> GameReport:
    """Advantage of ``distinguisher`` between the all-zero and the true bridge-key distributions."""
    if not isinstance(bridge.target, HomomorphicScheme):
        raise ParameterError(f"bridge {bridge.name} does not target a homomorphic scheme")
    e = key_width(bridge.source)
    zero = hybrid_fixture(bridge.source, bridge.target, 0, width=e)
    real = hybrid_fixture(bridge.source, bridge.target, e, width=e)
    return estimate_advantage(
        distinguisher, zero.sampler, real.sampler, trials, rng, jobs=jobs, label=f"key-distinguish/{bridge.name}"
    )
