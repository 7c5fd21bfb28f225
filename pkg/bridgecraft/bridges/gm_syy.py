"""The GM -> SYY bridge with an empty bridge key, and the encrypted equality test built on it.

Both schemes share the secret primes (p, q); the SYY public key carries its
own non-residue gamma'. Bridging a GM ciphertext c mixes c * gamma' through a
fresh nonsingular matrix, which sends "c encrypts 1" to the all-square vector
and "c encrypts 0" to a vector with at least one non-square.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import gmpy2

from bridgecraft import config
from bridgecraft.bridges.base import Bridge, BridgeKeyMaterial, BridgePublicKey, PlaintextEmbedding
from bridgecraft.errors import KeyMismatchError, ParameterError
from bridgecraft.schemes.base import F2, KeyPair
from bridgecraft.schemes.gm import GmCiphertext, GmPublicKey, GmScheme, GmSecretKey, check_gm_ciphertext, gm_square
from bridgecraft.schemes.syy import SyyCiphertext, SyyPublicKey, SyyScheme, and_failure_probability, syy_and, syy_public_key_from_secret
from bridgecraft.utils.numtheory import GF2Matrix, random_nonsingular_gf2
from bridgecraft.utils.streams import Rng

logger = logging.getLogger("bridgecraft.bridges.gm_syy")


@dataclass(frozen=True)
class GmSyyBridge:
    """Key material of the GM -> SYY bridge: one secret key, two public keys."""

    sk: GmSecretKey
    gm_pk: GmPublicKey
    syy_pk: SyyPublicKey

    @property
    def ell(self) -> int:
        return self.syy_pk.ell

    @classmethod
    def from_material(cls, material: BridgeKeyMaterial) -> "GmSyyBridge":
        return cls(material.sk1, material.pk1, material.pk2)

    def to_material(self) -> BridgeKeyMaterial:
        return BridgeKeyMaterial(self.sk, self.gm_pk, self.sk, self.syy_pk, None)


def bridge_gm_ciphertext(
    syy_pk: SyyPublicKey,
    c: GmCiphertext,
    rng: Rng,
    matrix: Optional[GF2Matrix] = None,
    reduce_exponents: bool = True,
) -> SyyCiphertext:
    """t_i = (c * gamma')^{w_i} * r_i^2 with w_i the weight of row i of a nonsingular A.

    With ``reduce_exponents`` the weights are taken mod 2; the even part is a
    square and disappears into r_i^2.
    """
    n = syy_pk.n
    check_gm_ciphertext(GmPublicKey(n, syy_pk.gamma), c)
    if matrix is None:
        matrix = random_nonsingular_gf2(syy_pk.ell, rng)
    elif matrix.dim != syy_pk.ell:
        raise KeyMismatchError(f"mixing matrix must be {syy_pk.ell}x{syy_pk.ell}")

    base = c.value * syy_pk.gamma % n
    components = []
    for weight in matrix.row_weights():
        exponent = int(weight) % 2 if reduce_exponents else int(weight)
        t = gmpy2.powmod(base, exponent, n)
        components.append(int(t * gm_square(n, rng) % n))
    return SyyCiphertext(tuple(components))


def gm_to_syy(
    bridge: GmSyyBridge,
    c: GmCiphertext,
    rng: Rng,
    matrix: Optional[GF2Matrix] = None,
    reduce_exponents: bool = True,
) -> SyyCiphertext:
    if c.value >= bridge.gm_pk.n:
        raise KeyMismatchError("GM ciphertext does not belong to the bridge modulus")
    return bridge_gm_ciphertext(bridge.syy_pk, c, rng, matrix=matrix, reduce_exponents=reduce_exponents)


def compare_failure_bound(n: int, ell: int) -> float:
    return min(1.0, (n - 1) * and_failure_probability(ell))


def compare_eval(
    bridge: GmSyyBridge,
    cs: Sequence[GmCiphertext],
    ds: Sequence[GmCiphertext],
    rng: Rng,
    balanced: bool = False,
) -> SyyCiphertext:
    """Encrypted [x == y] from bitwise GM encryptions of x and y.

    Each c_i * d_i * gamma encrypts x_i XOR y_i XOR 1; those are bridged to SYY
    and combined with the SYY AND, left to right unless ``balanced``.
    """
    if len(cs) != len(ds):
        raise ParameterError(f"vectors have different lengths: {len(cs)} and {len(ds)}")
    if not cs:
        raise ParameterError("comparison needs at least one bit")
    n = bridge.gm_pk.n
    gamma = bridge.gm_pk.gamma
    terms: List[SyyCiphertext] = []
    for c, d in zip(cs, ds):
        for x in (c, d):
            if not 0 < x.value < n:
                raise KeyMismatchError("GM ciphertext does not belong to the bridge modulus")
        equal_bit = GmCiphertext(c.value * d.value * gamma % n)
        terms.append(bridge_gm_ciphertext(bridge.syy_pk, equal_bit, rng))

    if not balanced:
        acc = terms[0]
        for t in terms[1:]:
            acc = syy_and(bridge.syy_pk, acc, t, rng)
        return acc

    while len(terms) > 1:
        nxt = [syy_and(bridge.syy_pk, terms[i], terms[i + 1], rng) for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


def gm_syy_bridge(
    bits: int = 512,
    ell: Optional[int] = None,
    fixed_primes: Optional[tuple] = None,
    reduce_exponents: bool = True,
) -> Bridge:
    """The entangled bridge: sk2 = sk1, a fresh SYY public key on the same primes, no bridge key."""
    ell = ell if ell is not None else config.SYY_ELL
    source = GmScheme(bits, fixed_primes=fixed_primes)
    target = SyyScheme(bits, ell, fixed_primes=fixed_primes)

    def derive_target(sk1: GmSecretKey, pk1: GmPublicKey, rng: Rng) -> KeyPair:
        syy_pk = syy_public_key_from_secret(sk1, ell, rng)
        return KeyPair(sk1, syy_pk, evk=syy_pk)

    def map_f(public: BridgePublicKey, c: GmCiphertext, rng: Rng) -> SyyCiphertext:
        return bridge_gm_ciphertext(public.pk2, c, rng, reduce_exponents=reduce_exponents)

    logger.info(f"Built GM -> SYY bridge with {bits}-bit modulus and ell={ell}")
    return Bridge(
        name="gm-syy",
        source=source,
        target=target,
        embedding=PlaintextEmbedding.identity(F2),
        derive_target=derive_target,
        derive_bridge_key=lambda sk1, pk1, keys, rng: None,
        map_f=map_f,
        failure_bound=0.0,
    )
