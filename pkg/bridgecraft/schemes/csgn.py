"""Symmetric CSGN encryption over F2^n with componentwise multiplication.

The key is a secret subset S of the coordinates. A fresh ciphertext has
exactly d zero coordinates: none inside S for 1, k ~ X of them inside S for 0.
Decryption is the product of the coordinates indexed by S.
"""

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from bridgecraft.errors import KeyMismatchError, ParameterError
from bridgecraft.schemes.base import F2, HomomorphicScheme, KeyPair
from bridgecraft.schemes.circuit import Circuit, GateKind, GateOps, evaluate
from bridgecraft.utils.findist import FiniteDistribution
from bridgecraft.utils.streams import Rng

logger = logging.getLogger("bridgecraft.schemes.csgn")


@dataclass(frozen=True, eq=False)
class CsgnKey:
    n: int
    d: int
    s: int
    subset: np.ndarray
    x_dist: FiniteDistribution

    def indices(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.subset)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CsgnKey):
            return NotImplemented
        return (self.n, self.d, self.s) == (other.n, other.d, other.s) and np.array_equal(self.subset, other.subset)

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.s, self.subset.tobytes()))


@dataclass(frozen=True, eq=False)
class CsgnCiphertext:
    bits: np.ndarray

    @property
    def n(self) -> int:
        return int(self.bits.shape[0])

    def zero_count(self) -> int:
        return int(self.n - self.bits.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CsgnCiphertext):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())


def default_x_distribution(d: int) -> FiniteDistribution:
    return FiniteDistribution.uniform(range(1, d + 1))


def check_csgn_params(n: int, d: int, s: int, x_dist: FiniteDistribution) -> None:
    if not 1 <= d <= n:
        raise ParameterError(f"need 1 <= d <= n, got d={d}, n={n}")
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s={s}, n={n}")
    if s + d > n:
        raise ParameterError(f"need s + d <= n so that 1 can be encrypted, got s={s}, d={d}, n={n}")
    for k in x_dist.support:
        if not isinstance(k, int) or not 1 <= k <= d:
            raise ParameterError(f"X must be supported on 1..{d}, found {k!r}")
        if k > s:
            raise ParameterError(f"X may place {k} zeros inside a subset of size {s}")


def csgn_keygen(n: int, d: int, s: int, rng: Rng, x_dist: Optional[FiniteDistribution] = None) -> CsgnKey:
    """Uniform subset S of size s; X defaults to uniform on 1..d."""
    if x_dist is None:
        x_dist = default_x_distribution(d)
    check_csgn_params(n, d, s, x_dist)
    subset = np.zeros(n, dtype=np.uint8)
    subset[rng.sample(range(n), s)] = 1
    subset.setflags(write=False)
    logger.debug(f"Generated CSGN key with n={n}, d={d}, s={s}")
    return CsgnKey(n, d, s, subset, x_dist)


def csgn_enc(key: CsgnKey, m: int, rng: Rng) -> CsgnCiphertext:
    if m not in (0, 1):
        raise ParameterError(f"CSGN encrypts single bits, got {m!r}")
    inside = key.indices()
    outside = [int(i) for i in np.flatnonzero(key.subset == 0)]
    k = 0 if m == 1 else key.x_dist.sample(rng)
    zeros = rng.sample(inside, k) + rng.sample(outside, key.d - k)
    bits = np.ones(key.n, dtype=np.uint8)
    bits[zeros] = 0
    return CsgnCiphertext(bits)


def _check_length(n: int, c: CsgnCiphertext) -> None:
    if c.n != n:
        raise KeyMismatchError(f"ciphertext has length {c.n}, expected {n}")


def csgn_dec(key: CsgnKey, c: CsgnCiphertext) -> int:
    _check_length(key.n, c)
    return int(np.all(c.bits[key.subset == 1] == 1))


def csgn_mul(c1: CsgnCiphertext, c2: CsgnCiphertext) -> CsgnCiphertext:
    _check_length(c1.n, c2)
    return CsgnCiphertext(c1.bits & c2.bits)


class CsgnOps(GateOps):
    def __init__(self, n: int):
        self.n = n

    def const(self, value: int) -> CsgnCiphertext:
        fill = np.ones if value % 2 else np.zeros
        return CsgnCiphertext(fill(self.n, dtype=np.uint8))

    def mul(self, a: CsgnCiphertext, b: CsgnCiphertext) -> CsgnCiphertext:
        return csgn_mul(a, b)


class CsgnScheme(HomomorphicScheme):
    """CSGN as a symmetric, multiplication-only homomorphic scheme.

    The evaluation key is just the dimension n; the public key is the secret key.
    """

    name = "csgn"
    symmetric = True
    supported_gates = frozenset({GateKind.MUL})

    def __init__(self, n: int = 256, d: int = 16, s: int = 32, x_dist: Optional[FiniteDistribution] = None):
        self.x_dist = x_dist if x_dist is not None else default_x_distribution(d)
        check_csgn_params(n, d, s, self.x_dist)
        super().__init__(F2, capacity=None, level=n)
        self.n, self.d, self.s = n, d, s

    def keygen(self, rng: Rng) -> KeyPair:
        key = csgn_keygen(self.n, self.d, self.s, rng, self.x_dist)
        return KeyPair(key, key, evk=self.n)

    def enc(self, pk: CsgnKey, m: int, rng: Rng) -> CsgnCiphertext:
        return csgn_enc(pk, m, rng)

    def dec(self, sk: CsgnKey, c: CsgnCiphertext) -> int:
        return csgn_dec(sk, c)

    def public_key(self, sk: CsgnKey, rng: Rng) -> CsgnKey:
        return sk

    def secret_key_bits(self, sk: CsgnKey) -> Tuple[int, ...]:
        return tuple(int(b) for b in sk.subset)

    def trivial(self, evk: int, m: int) -> CsgnCiphertext:
        return CsgnOps(evk).const(m)

    def eval(self, evk: int, circuit: Circuit, inputs: Sequence[Any], rng: Rng) -> List[CsgnCiphertext]:
        self.check_circuit(circuit)
        return evaluate(circuit, inputs, CsgnOps(evk))
