"""Sander-Young-Yung encryption over the monoid ({0,1}, *).

A bit is a vector of ell GM ciphertexts: 1 is the all-zero GM vector, 0 any
nonzero one. ``syy_and`` multiplies plaintexts by mixing the two vectors with
fresh nonsingular GF(2) matrices; it fails (returns 1 for 0*0) with
probability exactly 1/(2^ell - 1).
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

from bridgecraft.errors import KeyMismatchError, MalformedCiphertextError, ParameterError, SamplingError
from bridgecraft.schemes.base import F2, HomomorphicScheme, KeyPair
from bridgecraft.schemes.circuit import Circuit, GateKind, GateOps, evaluate
from bridgecraft.schemes.gm import (
    GmCiphertext,
    GmPublicKey,
    GmSecretKey,
    gm_dec,
    gm_enc,
    gm_keygen,
    gm_public_key_from_secret,
    gm_square,
)
from bridgecraft.utils.numtheory import GF2Matrix, random_nonsingular_gf2
from bridgecraft.utils.streams import Rng

logger = logging.getLogger("bridgecraft.schemes.syy")


@dataclass(frozen=True)
class SyyPublicKey:
    n: int
    gamma: int
    ell: int

    @property
    def gm(self) -> GmPublicKey:
        return GmPublicKey(self.n, self.gamma)


@dataclass(frozen=True)
class SyyCiphertext:
    components: Tuple[int, ...]

    @property
    def ell(self) -> int:
        return len(self.components)


def and_failure_probability(ell: int) -> float:
    """Exact probability that AND of two encryptions of 0 decrypts to 1."""
    return 1.0 / (2 ** ell - 1)


def and_failure_bound(ell: int) -> float:
    return 2.0 ** (1 - ell)


def _check_ell(ell: int) -> int:
    if ell < 1:
        raise ParameterError(f"SYY vector length must be positive, got {ell}")
    return ell


def syy_keygen(bits: int, ell: int, rng: Rng, p: Optional[int] = None, q: Optional[int] = None) -> Tuple[GmSecretKey, SyyPublicKey]:
    _check_ell(ell)
    sk, gm_pk = gm_keygen(bits, rng, p=p, q=q)
    return sk, SyyPublicKey(gm_pk.n, gm_pk.gamma, ell)


def syy_public_key_from_secret(sk: GmSecretKey, ell: int, rng: Rng) -> SyyPublicKey:
    _check_ell(ell)
    gm_pk = gm_public_key_from_secret(sk, rng)
    return SyyPublicKey(gm_pk.n, gm_pk.gamma, ell)


def _nonzero_vector(ell: int, rng: Rng, max_attempts: int = 64) -> List[int]:
    for _ in range(max_attempts):
        word = rng.getrandbits(ell)
        if word:
            return [(word >> k) & 1 for k in range(ell)]
    raise SamplingError(f"a nonzero vector of length {ell}", max_attempts)


def syy_enc(pk: SyyPublicKey, m: int, rng: Rng) -> SyyCiphertext:
    if m not in (0, 1):
        raise ParameterError(f"SYY encrypts single bits, got {m!r}")
    vector = [0] * pk.ell if m == 1 else _nonzero_vector(pk.ell, rng)
    gm_pk = pk.gm
    return SyyCiphertext(tuple(gm_enc(gm_pk, v, rng).value for v in vector))


def syy_decrypt_vector(sk: GmSecretKey, c: SyyCiphertext) -> np.ndarray:
    """Componentwise GM decryption."""
    return np.array([gm_dec(sk, GmCiphertext(v)) for v in c.components], dtype=np.uint8)


def syy_dec(sk: GmSecretKey, c: SyyCiphertext) -> int:
    if not c.components:
        raise MalformedCiphertextError("SYY ciphertext has no components")
    return 0 if syy_decrypt_vector(sk, c).any() else 1


def syy_trivial(pk: SyyPublicKey, m: int) -> SyyCiphertext:
    """Deterministic encryption: all ones for 1, gamma in the first slot for 0."""
    if m not in (0, 1):
        raise ParameterError(f"SYY encrypts single bits, got {m!r}")
    first = 1 if m == 1 else pk.gamma
    return SyyCiphertext((first,) + (1,) * (pk.ell - 1))


def _check_operand(pk: SyyPublicKey, c: SyyCiphertext) -> None:
    if len(c.components) != pk.ell:
        raise KeyMismatchError(f"ciphertext has {len(c.components)} components, key expects {pk.ell}")
    if any(not 0 < v < pk.n for v in c.components):
        raise KeyMismatchError(f"ciphertext component not reduced modulo N={pk.n}")


def mix(n: int, matrix: GF2Matrix, components: Sequence[int]) -> List[int]:
    """Row i of the result is the product of the components selected by row i of ``matrix``."""
    out = []
    for row in matrix.bits:
        acc = 1
        for j in np.flatnonzero(row):
            acc = acc * components[j] % n
        out.append(acc)
    return out


def syy_and(
    pk: SyyPublicKey,
    x: SyyCiphertext,
    y: SyyCiphertext,
    rng: Rng,
    a: Optional[GF2Matrix] = None,
    b: Optional[GF2Matrix] = None,
) -> SyyCiphertext:
    """Randomized AND: v_z = A v_x + B v_y, then re-randomize with fresh squares.

    ``a`` and ``b`` may be forced for exhaustive checks; both are otherwise
    sampled fresh for every call.
    """
    _check_operand(pk, x)
    _check_operand(pk, y)
    if a is None:
        a = random_nonsingular_gf2(pk.ell, rng)
    if b is None:
        b = random_nonsingular_gf2(pk.ell, rng)
    if a.dim != pk.ell or b.dim != pk.ell:
        raise KeyMismatchError(f"mixing matrices must be {pk.ell}x{pk.ell}")

    left = mix(pk.n, a, x.components)
    right = mix(pk.n, b, y.components)
    z = tuple(int(l * r * gm_square(pk.n, rng) % pk.n) for l, r in zip(left, right))
    return SyyCiphertext(z)


class SyyOps(GateOps):
    def __init__(self, pk: SyyPublicKey, rng: Rng):
        self.pk = pk
        self.rng = rng

    def const(self, value: int) -> SyyCiphertext:
        return syy_trivial(self.pk, value % 2)

    def mul(self, a: SyyCiphertext, b: SyyCiphertext) -> SyyCiphertext:
        return syy_and(self.pk, a, b, self.rng)


class SyyScheme(HomomorphicScheme):
    """SYY as a multiplication-only homomorphic scheme; evk is the public key."""

    name = "syy"
    supported_gates = frozenset({GateKind.MUL})
    compact = True

    def __init__(self, bits: int = 512, ell: int = 50, fixed_primes: Optional[Tuple[int, int]] = None):
        super().__init__(F2, capacity=None, level=bits)
        self.bits = bits
        self.ell = _check_ell(ell)
        self.fixed_primes = fixed_primes
        self.mul_failure_bound = and_failure_bound(ell)

    def keygen(self, rng: Rng) -> KeyPair:
        p, q = self.fixed_primes if self.fixed_primes is not None else (None, None)
        sk, pk = syy_keygen(self.bits, self.ell, rng, p=p, q=q)
        return KeyPair(sk, pk, evk=pk)

    def enc(self, pk: SyyPublicKey, m: int, rng: Rng) -> SyyCiphertext:
        return syy_enc(pk, m, rng)

    def dec(self, sk: GmSecretKey, c: SyyCiphertext) -> int:
        return syy_dec(sk, c)

    def public_key(self, sk: GmSecretKey, rng: Rng) -> SyyPublicKey:
        return syy_public_key_from_secret(sk, self.ell, rng)

    def trivial(self, evk: SyyPublicKey, m: int) -> SyyCiphertext:
        return syy_trivial(evk, m)

    def eval(self, evk: SyyPublicKey, circuit: Circuit, inputs: Sequence[Any], rng: Rng) -> List[SyyCiphertext]:
        self.check_circuit(circuit)
        return evaluate(circuit, inputs, SyyOps(evk, rng))
