"""Goldwasser-Micali bit encryption.

Ciphertexts live in J1(N), the units of Jacobi symbol +1. A ciphertext
encrypts 0 when it is a square modulo p and 1 otherwise; multiplying
ciphertexts XORs the plaintexts.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import gmpy2

from bridgecraft.errors import KeyMismatchError, MalformedCiphertextError, ParameterError
from bridgecraft.schemes.base import F2, EncryptionScheme, KeyPair
from bridgecraft.utils.numtheory import MIN_GM_BITS, find_qnr_both, gen_gm_modulus, is_qnr_both, jacobi, legendre, random_unit
from bridgecraft.utils.streams import Rng

logger = logging.getLogger("bridgecraft.schemes.gm")


@dataclass(frozen=True)
class GmPublicKey:
    n: int
    gamma: int


@dataclass(frozen=True)
class GmSecretKey:
    p: int
    q: int

    @property
    def n(self) -> int:
        return self.p * self.q


@dataclass(frozen=True)
class GmCiphertext:
    value: int


def _check_bit(m: int) -> int:
    if m not in (0, 1) or isinstance(m, bool):
        raise ParameterError(f"GM encrypts single bits, got {m!r}")
    return int(m)


def gm_keygen(
    bits: int,
    rng: Rng,
    p: Optional[int] = None,
    q: Optional[int] = None,
    eta: Optional[int] = None,
    u: Optional[int] = None,
) -> Tuple[GmSecretKey, GmPublicKey]:
    """Generate a GM key pair with gamma = eta * u^2.

    Args:
        bits: Size of N. Ignored when both primes are forced.
        rng: Random stream.
        p, q: Force the primes.
        eta: Force the non-residue.
        u: Force the unit; must be coprime to N.
    """
    modulus = gen_gm_modulus(bits, rng, p=p, q=q, eta=eta)
    n = modulus.n
    if u is None:
        u = random_unit(n, rng)
    elif gmpy2.gcd(u, n) != 1:
        raise ParameterError(f"u={u} is not a unit modulo {n}")
    gamma = modulus.eta * u * u % n
    logger.info(f"Generated GM key with a {n.bit_length()}-bit modulus")
    return GmSecretKey(modulus.p, modulus.q), GmPublicKey(n, gamma)


def gm_public_key_from_secret(sk: GmSecretKey, rng: Rng) -> GmPublicKey:
    """A fresh public key sharing (p, q): new eta and new u."""
    n = sk.n
    eta = find_qnr_both(sk.p, sk.q, rng)
    u = random_unit(n, rng)
    return GmPublicKey(n, eta * u * u % n)


def check_gm_ciphertext(pk: GmPublicKey, c: GmCiphertext) -> GmCiphertext:
    """Membership in J1(N)."""
    if not isinstance(c, GmCiphertext):
        raise MalformedCiphertextError(f"expected a GM ciphertext, got {type(c).__name__}")
    if not 0 < c.value < pk.n:
        raise KeyMismatchError(f"ciphertext value is not reduced modulo N={pk.n}")
    if jacobi(c.value, pk.n) != 1:
        raise MalformedCiphertextError("ciphertext is not in J1(N)")
    return c


def gm_enc(pk: GmPublicKey, m: int, rng: Rng, xi: Optional[int] = None) -> GmCiphertext:
    """gamma^m * xi^2 mod N with xi a uniform unit."""
    m = _check_bit(m)
    if xi is None:
        xi = random_unit(pk.n, rng)
    value = gmpy2.powmod(pk.gamma, m, pk.n) * gmpy2.powmod(xi, 2, pk.n) % pk.n
    return GmCiphertext(int(value))


def gm_dec(sk: GmSecretKey, c: GmCiphertext) -> int:
    value = c.value % sk.n
    if gmpy2.gcd(value, sk.n) != 1:
        raise MalformedCiphertextError("ciphertext is not a unit modulo N")
    return 0 if legendre(value, sk.p) == 1 else 1


def gm_xor(pk: GmPublicKey, c1: GmCiphertext, c2: GmCiphertext) -> GmCiphertext:
    for c in (c1, c2):
        if not 0 < c.value < pk.n:
            raise KeyMismatchError(f"ciphertext does not belong to modulus N={pk.n}")
    return GmCiphertext(c1.value * c2.value % pk.n)


def gm_rerandomize(pk: GmPublicKey, c: GmCiphertext, rng: Rng) -> GmCiphertext:
    xi = random_unit(pk.n, rng)
    return GmCiphertext(int(c.value * gmpy2.powmod(xi, 2, pk.n) % pk.n))


def gm_square(n: int, rng: Rng) -> int:
    """A uniform square unit modulo n."""
    r = random_unit(n, rng)
    return int(gmpy2.powmod(r, 2, n))


class GmScheme(EncryptionScheme):
    """GM as an encryption scheme over F2."""

    name = "gm"

    def __init__(self, bits: int = 512, fixed_primes: Optional[Tuple[int, int]] = None):
        if fixed_primes is None and bits < MIN_GM_BITS:
            raise ParameterError(f"GM modulus must have at least {MIN_GM_BITS} bits, got {bits}")
        super().__init__(F2, level=bits)
        self.bits = bits
        self.fixed_primes = fixed_primes

    @property
    def prime_bits(self) -> int:
        if self.fixed_primes is not None:
            return max(p.bit_length() for p in self.fixed_primes)
        return self.bits // 2

    def keygen(self, rng: Rng) -> KeyPair:
        p, q = self.fixed_primes if self.fixed_primes is not None else (None, None)
        sk, pk = gm_keygen(self.bits, rng, p=p, q=q)
        return KeyPair(sk, pk)

    def enc(self, pk: GmPublicKey, m: int, rng: Rng) -> GmCiphertext:
        return gm_enc(pk, m, rng)

    def dec(self, sk: GmSecretKey, c: GmCiphertext) -> int:
        return gm_dec(sk, c)

    def public_key(self, sk: GmSecretKey, rng: Rng) -> GmPublicKey:
        return gm_public_key_from_secret(sk, rng)

    def secret_key_bits(self, sk: GmSecretKey) -> Tuple[int, ...]:
        width = self.prime_bits
        return tuple((sk.p >> (width - 1 - k)) & 1 for k in range(width))

    def valid_gamma(self, sk: GmSecretKey, pk: GmPublicKey) -> bool:
        """gamma is a non-residue modulo both primes (needs the secret key)."""
        return pk.n == sk.n and is_qnr_both(pk.gamma, sk.p, sk.q)
