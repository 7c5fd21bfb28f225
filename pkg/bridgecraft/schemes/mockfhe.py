"""Transparent homomorphic backend.

Ciphertexts carry their plaintext in the clear together with a multiplicative
depth counter. Decryption enforces the key's depth capacity, which is how a
"somewhat homomorphic" target is modelled. Insecure by construction; it exists
so that bridges into a homomorphic target can be checked exactly.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from bridgecraft.errors import DepthExceededError, KeyMismatchError, ParameterError
from bridgecraft.schemes.base import HomomorphicScheme, KeyPair, ModularRing
from bridgecraft.schemes.circuit import Circuit, GateKind, GateOps, evaluate
from bridgecraft.utils.numtheory import is_probable_prime
from bridgecraft.utils.streams import Rng

logger = logging.getLogger("bridgecraft.schemes.mockfhe")


@dataclass(frozen=True)
class MockKey:
    """Secret, public and evaluation keys are all this record."""

    modulus: int
    capacity: Optional[int]
    key_id: int


@dataclass(frozen=True)
class MockCiphertext:
    plaintext: int
    depth: int
    tag: int
    modulus: int
    key_id: int


def _check_ring(p: int) -> ModularRing:
    if p != 2 and not is_probable_prime(p):
        raise ParameterError(f"mock ring modulus must be prime, got {p}")
    return ModularRing(p)


def mock_keygen(p: int, capacity: Optional[int], rng: Rng) -> KeyPair:
    """Keys over F_p; ``capacity=None`` means unbounded depth."""
    _check_ring(p)
    if capacity is not None and capacity < 0:
        raise ParameterError(f"capacity must be nonnegative, got {capacity}")
    key = MockKey(p, capacity, rng.getrandbits(64))
    return KeyPair(key, key, evk=key)


def _check_key(key: MockKey, c: MockCiphertext) -> None:
    if not isinstance(c, MockCiphertext):
        raise KeyMismatchError(f"expected a mock ciphertext, got {type(c).__name__}")
    if c.key_id != key.key_id or c.modulus != key.modulus:
        raise KeyMismatchError("mock ciphertext was produced under a different key")


def mock_enc(pk: MockKey, m: int, rng: Rng) -> MockCiphertext:
    ModularRing(pk.modulus).check(m)
    return MockCiphertext(m, 0, rng.getrandbits(64), pk.modulus, pk.key_id)


def mock_trivial(evk: MockKey, m: int) -> MockCiphertext:
    ModularRing(evk.modulus).check(m)
    return MockCiphertext(m, 0, 0, evk.modulus, evk.key_id)


def mock_dec(sk: MockKey, c: MockCiphertext) -> int:
    _check_key(sk, c)
    if sk.capacity is not None and c.depth > sk.capacity:
        raise DepthExceededError(c.depth, sk.capacity)
    return c.plaintext


class MockOps(GateOps):
    """Gate semantics on mock ciphertexts; MUL and AND add one level of depth."""

    def __init__(self, evk: MockKey, rng: Rng):
        self.evk = evk
        self.ring = ModularRing(evk.modulus)
        self.rng = rng

    def _out(self, value: int, depth: int) -> MockCiphertext:
        return MockCiphertext(value, depth, self.rng.getrandbits(64), self.evk.modulus, self.evk.key_id)

    def const(self, value: int) -> MockCiphertext:
        return mock_trivial(self.evk, value % self.evk.modulus)

    def add(self, a: MockCiphertext, b: MockCiphertext) -> MockCiphertext:
        return self._out(self.ring.add(a.plaintext, b.plaintext), max(a.depth, b.depth))

    def sub(self, a: MockCiphertext, b: MockCiphertext) -> MockCiphertext:
        return self._out(self.ring.sub(a.plaintext, b.plaintext), max(a.depth, b.depth))

    def mul(self, a: MockCiphertext, b: MockCiphertext) -> MockCiphertext:
        return self._out(self.ring.mul(a.plaintext, b.plaintext), max(a.depth, b.depth) + 1)

    def xor(self, a: MockCiphertext, b: MockCiphertext) -> MockCiphertext:
        self._boolean_only()
        return self.add(a, b)

    def and_(self, a: MockCiphertext, b: MockCiphertext) -> MockCiphertext:
        self._boolean_only()
        return self.mul(a, b)

    def _boolean_only(self):
        if self.evk.modulus != 2:
            raise ParameterError(f"boolean gates need F2, not {self.ring}")


def _eval_all(evk: MockKey, circuit: Circuit, inputs: Sequence[MockCiphertext], rng: Rng) -> List[MockCiphertext]:
    for c in inputs:
        _check_key(evk, c)
    return evaluate(circuit, inputs, MockOps(evk, rng))


def mock_eval(evk: MockKey, circuit: Circuit, inputs: Sequence[MockCiphertext], rng: Rng) -> MockCiphertext:
    """Evaluate a single-output circuit."""
    if len(circuit.outputs) != 1:
        raise ParameterError(f"mock_eval needs a single-output circuit, got {len(circuit.outputs)} outputs")
    return _eval_all(evk, circuit, inputs, rng)[0]


class MockFheScheme(HomomorphicScheme):
    name = "mock"
    compact = True
    supported_gates = frozenset({GateKind.ADD, GateKind.SUB, GateKind.MUL, GateKind.POW, GateKind.XOR, GateKind.AND})

    def __init__(self, p: int = 2, capacity: Optional[int] = None):
        super().__init__(_check_ring(p), capacity=capacity, level=0)
        self.p = p
        self.name = f"mock-f{p}"

    def keygen(self, rng: Rng) -> KeyPair:
        return mock_keygen(self.p, self.capacity, rng)

    def enc(self, pk: MockKey, m: int, rng: Rng) -> MockCiphertext:
        return mock_enc(pk, m, rng)

    def dec(self, sk: MockKey, c: MockCiphertext) -> int:
        return mock_dec(sk, c)

    def public_key(self, sk: MockKey, rng: Rng) -> MockKey:
        return sk

    def trivial(self, evk: MockKey, m: int) -> MockCiphertext:
        return mock_trivial(evk, m)

    def eval(self, evk: MockKey, circuit: Circuit, inputs: Sequence[MockCiphertext], rng: Rng) -> List[MockCiphertext]:
        self.check_circuit(circuit)
        return _eval_all(evk, circuit, inputs, rng)
