"""Contracts shared by every scheme: plaintext spaces, key pairs, encryption and
homomorphic schemes, scheme products and the knowledge wrapper."""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, FrozenSet, List, Optional, Sequence, Tuple

from bridgecraft.errors import KeyMismatchError, ParameterError
from bridgecraft.utils.streams import Rng

if TYPE_CHECKING:
    from bridgecraft.schemes.circuit import Circuit

logger = logging.getLogger("bridgecraft.schemes.base")


class PlaintextSpace(ABC):
    """A finite plaintext set that can be written as a fixed-width bit string."""

    @abstractmethod
    def elements(self) -> Tuple[Any, ...]:
        pass

    @abstractmethod
    def contains(self, m: Any) -> bool:
        pass

    @property
    @abstractmethod
    def bit_length(self) -> int:
        pass

    @abstractmethod
    def encode(self, m: Any) -> Tuple[int, ...]:
        pass

    @abstractmethod
    def decode(self, bits: Sequence[int]) -> Any:
        pass

    def sample(self, rng: Rng) -> Any:
        return rng.choice(self.elements())

    def check(self, m: Any) -> Any:
        if not self.contains(m):
            raise ParameterError(f"{m!r} is not a plaintext of {self}")
        return m


class ModularRing(PlaintextSpace):
    """Z/pZ with p >= 2. ``ModularRing(2)`` doubles as the bit space."""

    def __init__(self, p: int):
        if p < 2:
            raise ParameterError(f"ring modulus must be at least 2, got {p}")
        self.p = p

    def __repr__(self) -> str:
        return f"F{self.p}" if self.p == 2 else f"Z/{self.p}"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModularRing) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("ring", self.p))

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def elements(self) -> Tuple[int, ...]:
        return tuple(range(self.p))

    def contains(self, m: Any) -> bool:
        return isinstance(m, int) and not isinstance(m, bool) and 0 <= m < self.p

    @property
    def bit_length(self) -> int:
        return (self.p - 1).bit_length()

    def encode(self, m: int) -> Tuple[int, ...]:
        self.check(m)
        return tuple((m >> (self.bit_length - 1 - k)) & 1 for k in range(self.bit_length))

    def decode(self, bits: Sequence[int]) -> int:
        if len(bits) != self.bit_length:
            raise ParameterError(f"{self} decodes {self.bit_length} bits, got {len(bits)}")
        value = 0
        for b in bits:
            value = (value << 1) | (b & 1)
        return self.check(value)


F2 = ModularRing(2)


class ProductSpace(PlaintextSpace):
    """Cartesian product of plaintext spaces; elements are tuples."""

    def __init__(self, factors: Sequence[PlaintextSpace]):
        if not factors:
            raise ParameterError("product space needs at least one factor")
        self.factors = tuple(factors)

    def __repr__(self) -> str:
        return " x ".join(repr(f) for f in self.factors)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProductSpace) and other.factors == self.factors

    def __hash__(self) -> int:
        return hash(("product", self.factors))

    def elements(self) -> Tuple[Tuple[Any, ...], ...]:
        return tuple(itertools.product(*(f.elements() for f in self.factors)))

    def contains(self, m: Any) -> bool:
        return (
            isinstance(m, tuple)
            and len(m) == len(self.factors)
            and all(f.contains(x) for f, x in zip(self.factors, m))
        )

    @property
    def bit_length(self) -> int:
        return sum(f.bit_length for f in self.factors)

    def encode(self, m: Tuple[Any, ...]) -> Tuple[int, ...]:
        self.check(m)
        return tuple(bit for f, x in zip(self.factors, m) for bit in f.encode(x))

    def decode(self, bits: Sequence[int]) -> Tuple[Any, ...]:
        if len(bits) != self.bit_length:
            raise ParameterError(f"{self} decodes {self.bit_length} bits, got {len(bits)}")
        out = []
        pos = 0
        for f in self.factors:
            out.append(f.decode(bits[pos:pos + f.bit_length]))
            pos += f.bit_length
        return tuple(out)

    def sample(self, rng: Rng) -> Tuple[Any, ...]:
        return tuple(f.sample(rng) for f in self.factors)


@dataclass(frozen=True)
class KeyPair:
    sk: Any
    pk: Any
    evk: Any = None


class EncryptionScheme(ABC):
    """keygen/enc/dec over a finite plaintext space.

    Symmetric schemes return the secret key as ``pk``; security games hand
    their adversaries an encryption oracle instead.
    """

    name: str = "scheme"
    symmetric: bool = False
    decryption_failure_bound: float = 0.0

    def __init__(self, plaintext_space: PlaintextSpace, level: int = 0):
        self.plaintext_space = plaintext_space
        # carried as metadata only
        self.level = level

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"

    @abstractmethod
    def keygen(self, rng: Rng) -> KeyPair:
        pass

    @abstractmethod
    def enc(self, pk: Any, m: Any, rng: Rng) -> Any:
        pass

    @abstractmethod
    def dec(self, sk: Any, c: Any) -> Any:
        pass

    def public_key(self, sk: Any, rng: Rng) -> Any:
        """Another public key for an existing secret key."""
        raise ParameterError(f"{self.name} cannot derive a second public key from a secret key")

    def secret_key_bits(self, sk: Any) -> Tuple[int, ...]:
        raise ParameterError(f"{self.name} does not expose its secret key as bits")

    def public_info(self, pk: Any) -> Any:
        """Public data an encryption oracle may reveal alongside oracle access."""
        return None


class HomomorphicScheme(EncryptionScheme):
    """An encryption scheme whose plaintexts form a ring and which evaluates circuits."""

    supported_gates: FrozenSet[str] = frozenset()
    compact: bool = True
    mul_failure_bound: float = 0.0

    def __init__(self, ring: ModularRing, capacity: Optional[int] = None, level: int = 0):
        super().__init__(ring, level)
        self.ring = ring
        self.capacity = capacity

    @abstractmethod
    def eval(self, evk: Any, circuit: "Circuit", inputs: Sequence[Any], rng: Rng) -> List[Any]:
        pass

    def trivial(self, evk: Any, m: int) -> Any:
        """Noiseless encryption computable from public data alone."""
        raise ParameterError(f"{self.name} has no trivial encryptions")

    def check_circuit(self, circuit: "Circuit") -> None:
        unsupported = circuit.kinds() - self.supported_gates
        if unsupported:
            raise ParameterError(f"{self.name} cannot evaluate gates {sorted(unsupported)}")


class ProductScheme(EncryptionScheme):
    """Componentwise product S1 x ... x Sk."""

    def __init__(self, schemes: Sequence[EncryptionScheme]):
        if not schemes:
            raise ParameterError("product of schemes needs at least one factor")
        self.schemes = tuple(schemes)
        super().__init__(ProductSpace([s.plaintext_space for s in self.schemes]), level=self.schemes[0].level)
        self.name = " x ".join(s.name for s in self.schemes)
        self.symmetric = any(s.symmetric for s in self.schemes)
        self.decryption_failure_bound = min(1.0, sum(s.decryption_failure_bound for s in self.schemes))

    def __len__(self) -> int:
        return len(self.schemes)

    def keygen(self, rng: Rng) -> KeyPair:
        pairs = [s.keygen(rng) for s in self.schemes]
        return KeyPair(
            sk=tuple(p.sk for p in pairs),
            pk=tuple(p.pk for p in pairs),
            evk=tuple(p.evk for p in pairs),
        )

    def _split(self, value: Any, what: str) -> Tuple[Any, ...]:
        if not isinstance(value, tuple) or len(value) != len(self.schemes):
            raise KeyMismatchError(f"{what} must have {len(self.schemes)} components")
        return value

    def enc(self, pk: Tuple[Any, ...], m: Tuple[Any, ...], rng: Rng) -> Tuple[Any, ...]:
        self.plaintext_space.check(m)
        pk = self._split(pk, "public key")
        return tuple(s.enc(k, x, rng) for s, k, x in zip(self.schemes, pk, m))

    def dec(self, sk: Tuple[Any, ...], c: Tuple[Any, ...]) -> Tuple[Any, ...]:
        sk = self._split(sk, "secret key")
        c = self._split(c, "ciphertext")
        return tuple(s.dec(k, x) for s, k, x in zip(self.schemes, sk, c))

    def public_key(self, sk: Tuple[Any, ...], rng: Rng) -> Tuple[Any, ...]:
        sk = self._split(sk, "secret key")
        return tuple(s.public_key(k, rng) for s, k in zip(self.schemes, sk))

    def secret_key_bits(self, sk: Tuple[Any, ...]) -> Tuple[int, ...]:
        sk = self._split(sk, "secret key")
        return tuple(bit for s, k in zip(self.schemes, sk) for bit in s.secret_key_bits(k))


def product_scheme(schemes: Sequence[EncryptionScheme]) -> ProductScheme:
    return ProductScheme(schemes)


def power_scheme(scheme: EncryptionScheme, copies: int) -> ProductScheme:
    """The product of ``copies`` copies of one scheme."""
    if copies < 1:
        raise ParameterError(f"need at least one copy, got {copies}")
    return ProductScheme([scheme] * copies)


@dataclass(frozen=True)
class KnowledgePublicKey:
    base: Any
    knowledge: Any


class KnowledgeWrapped(EncryptionScheme):
    """S[K]: the base scheme with extra public data K(sk, pk) appended to its public key.

    Encryption and decryption are the base scheme's, unchanged.
    """

    def __init__(self, base: EncryptionScheme, knowledge: Callable[[Any, Any, Rng], Any], name: Optional[str] = None):
        super().__init__(base.plaintext_space, base.level)
        self.base = base
        self.knowledge = knowledge
        self.name = name or f"{base.name}[K]"
        self.symmetric = base.symmetric
        self.decryption_failure_bound = base.decryption_failure_bound

    def keygen(self, rng: Rng) -> KeyPair:
        pair = self.base.keygen(rng)
        extra = self.knowledge(pair.sk, pair.pk, rng)
        return KeyPair(sk=pair.sk, pk=KnowledgePublicKey(pair.pk, extra), evk=pair.evk)

    def enc(self, pk: KnowledgePublicKey, m: Any, rng: Rng) -> Any:
        return self.base.enc(pk.base, m, rng)

    def dec(self, sk: Any, c: Any) -> Any:
        return self.base.dec(sk, c)

    def public_info(self, pk: KnowledgePublicKey) -> Any:
        return pk.knowledge
