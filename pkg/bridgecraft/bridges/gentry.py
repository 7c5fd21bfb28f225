"""Bridges built by evaluating the source decryption circuit inside a homomorphic target.

The bridge key holds target encryptions of the source secret key entries; f
feeds the source ciphertext bits in as trivial encryptions and evaluates the
decryption circuit homomorphically. Also home to the four CSGN instantiations.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

from bridgecraft.bridges.base import Bridge, BridgePublicKey, PlaintextEmbedding
from bridgecraft.errors import DepthExceededError, KeyMismatchError, ParameterError
from bridgecraft.schemes.base import F2, EncryptionScheme, HomomorphicScheme, KeyPair, ModularRing, power_scheme
from bridgecraft.schemes.circuit import BOOLEAN_GATES, Circuit, GateKind, eval_circuit_plain, product_circuit
from bridgecraft.schemes.csgn import CsgnCiphertext, CsgnKey, CsgnScheme
from bridgecraft.schemes.gm import GmCiphertext, GmScheme, GmSecretKey, gm_dec
from bridgecraft.schemes.mockfhe import MockFheScheme
from bridgecraft.utils.numtheory import is_probable_prime, jacobi
from bridgecraft.utils.streams import Rng, derive_rng

logger = logging.getLogger("bridgecraft.bridges.gentry")


@dataclass(frozen=True)
class DecCircuit:
    """A circuit computing iota(Dec(sk, c)) from key entries followed by ciphertext bits."""

    circuit: Circuit
    key_size: int
    cipher_size: int
    encode_key: Callable[[Any, Rng], Sequence[int]]
    encode_ciphertext: Callable[[Any], Sequence[int]]
    name: str = ""

    def __post_init__(self):
        if self.circuit.num_inputs != self.key_size + self.cipher_size:
            raise ParameterError(
                f"decryption circuit takes {self.circuit.num_inputs} inputs, "
                f"expected {self.key_size} key entries + {self.cipher_size} ciphertext bits"
            )

    @property
    def num_outputs(self) -> int:
        return len(self.circuit.outputs)

    def key_entries(self, sk: Any, rng: Rng) -> List[int]:
        entries = [int(e) for e in self.encode_key(sk, rng)]
        if len(entries) != self.key_size:
            raise KeyMismatchError(f"{self.name}: key encodes to {len(entries)} entries, expected {self.key_size}")
        return entries

    def cipher_bits(self, c: Any) -> List[int]:
        bits = [int(b) for b in self.encode_ciphertext(c)]
        if len(bits) != self.cipher_size:
            raise KeyMismatchError(f"{self.name}: ciphertext encodes to {len(bits)} bits, expected {self.cipher_size}")
        return bits

    def evaluate_plain(self, ring: ModularRing, sk: Any, c: Any, rng: Optional[Rng] = None) -> List[int]:
        """Plain evaluation; boolean circuits are rewritten first when ``ring`` is not F2."""
        circuit = self.circuit
        if ring.p != 2 and circuit.kinds() & BOOLEAN_GATES:
            circuit = rewrite_boolean_to_ring(circuit)
        rng = rng if rng is not None else derive_rng(0, "plain-dec")
        return eval_circuit_plain(circuit, ring, self.key_entries(sk, rng) + self.cipher_bits(c))


@dataclass(frozen=True)
class GentrySecretKey:
    source: Any
    target: Any


@dataclass(frozen=True)
class GentryBridgeKey:
    """Target encryptions of the source key entries, plus what f needs to evaluate."""

    entries: Tuple[Any, ...]
    evk: Any
    one: Any = None


def rewrite_boolean_to_ring(circuit: Circuit) -> Circuit:
    """XOR(x, y) -> 2(x+y) - (x+y)^2, AND(x, y) -> x*y.

    Agrees with the boolean circuit on {0, 1} inputs over any Z/pZ.
    """
    ring = Circuit(circuit.num_inputs, name=f"{circuit.name}/ring")
    wires = {}
    for gate in circuit.gates:
        kind = gate.kind
        if kind is GateKind.INPUT:
            wires[gate.id] = ring.inputs[gate.args[0]]
        elif kind is GateKind.CONST:
            wires[gate.id] = ring.const(gate.args[0])
        elif kind is GateKind.XOR:
            s = ring.add(wires[gate.args[0]], wires[gate.args[1]])
            wires[gate.id] = ring.sub(ring.add(s, s), ring.mul(s, s))
        elif kind is GateKind.AND:
            wires[gate.id] = ring.mul(wires[gate.args[0]], wires[gate.args[1]])
        else:
            raise ParameterError(f"cannot rewrite {kind.value} gate: input must be an XOR/AND circuit")
    return ring.set_outputs(*(wires[o] for o in circuit.outputs))


def equals_one(circuit: Circuit, p: int) -> Circuit:
    """Compose every output x with the test [x = 1] = 1 - (x - 1)^(p-1) over F_p."""
    out = Circuit(circuit.num_inputs, name=f"{circuit.name}/eq1")
    one = out.const(1)
    results = []
    for wire in out.embed(circuit, out.inputs):
        results.append(out.sub(one, out.pow(out.sub(wire, one), p - 1)))
    return out.set_outputs(*results)


def _prepare(circuit: Circuit, target: HomomorphicScheme, normalize: bool) -> Circuit:
    if circuit.kinds() & BOOLEAN_GATES:
        circuit = rewrite_boolean_to_ring(circuit)
    if normalize and target.ring.p > 2:
        circuit = equals_one(circuit, target.ring.p)
    target.check_circuit(circuit)
    depth = circuit.depth()
    if target.capacity is not None and depth > target.capacity:
        raise DepthExceededError(depth, target.capacity)
    logger.debug(f"Prepared {circuit!r} with depth {depth} for {target.name}")
    return circuit


def _target_keys(target: HomomorphicScheme) -> Callable[[Any, Any, Rng], KeyPair]:
    def derive_target(sk1: Any, pk1: Any, rng: Rng) -> KeyPair:
        keys = target.keygen(rng)
        pk2 = None if target.symmetric else keys.pk
        return KeyPair(GentrySecretKey(sk1, keys.sk), pk2, keys.evk)

    return derive_target


def _encrypt_entries(target: HomomorphicScheme, keys: KeyPair, entries: Sequence[int], rng: Rng) -> Tuple[Any, ...]:
    # symmetric targets keep their key in sk2
    enc_key = keys.sk.target if target.symmetric else keys.pk
    return tuple(target.enc(enc_key, e, rng) for e in entries)


def _lift_bits(target: HomomorphicScheme, public: BridgePublicKey, evk: Any, bits: Sequence[int], fresh: bool, rng: Rng) -> List[Any]:
    if fresh and not target.symmetric:
        return [target.enc(public.pk2, b, rng) for b in bits]
    return [target.trivial(evk, b) for b in bits]


def _mul_bound(circuit: Circuit, target: HomomorphicScheme) -> float:
    muls = sum(1 for g in circuit.gates if g.kind is GateKind.MUL)
    return min(1.0, muls * target.mul_failure_bound)


def compile_gentry_bridge(
    source: EncryptionScheme,
    target: HomomorphicScheme,
    embedding: PlaintextEmbedding,
    dec_circuit: DecCircuit,
    name: Optional[str] = None,
    fresh_inputs: bool = False,
    normalize: bool = True,
    failure_bound: Optional[float] = None,
) -> Bridge:
    """f(bk, c) = Eval(evk, Dec~, bk, c~) for a single-output decryption circuit.

    Args:
        source: Scheme whose ciphertexts are bridged.
        target: Homomorphic scheme evaluating the decryption circuit.
        embedding: iota from source plaintexts into the target ring.
        dec_circuit: Boolean or ring circuit computing iota(Dec(sk, c)).
        fresh_inputs: Encrypt the ciphertext bits freshly instead of trivially.
        normalize: Over F_p with p > 2, wrap the output in the test [x = 1].

    Raises:
        DepthExceededError: The prepared circuit is deeper than the target's capacity.
    """
    if dec_circuit.num_outputs != 1:
        raise ParameterError(f"{dec_circuit.name} has {dec_circuit.num_outputs} outputs; use compile_hp_variant")
    circuit = _prepare(dec_circuit.circuit, target, normalize)

    def derive_bridge_key(sk1: Any, pk1: Any, keys: KeyPair, rng: Rng) -> GentryBridgeKey:
        entries = dec_circuit.key_entries(sk1, rng)
        return GentryBridgeKey(_encrypt_entries(target, keys, entries, rng), keys.evk)

    def map_f(public: BridgePublicKey, c: Any, rng: Rng) -> Any:
        bk: GentryBridgeKey = public.bk
        lifted = _lift_bits(target, public, bk.evk, dec_circuit.cipher_bits(c), fresh_inputs, rng)
        return target.eval(bk.evk, circuit, list(bk.entries) + lifted, rng)[0]

    bridge_name = name or f"gentry-{source.name}-{target.name}"
    logger.info(f"Compiled {bridge_name}: {len(circuit)} gates, depth {circuit.depth()}")
    return Bridge(
        name=bridge_name,
        source=source,
        target=target,
        embedding=embedding,
        derive_target=_target_keys(target),
        derive_bridge_key=derive_bridge_key,
        map_f=map_f,
        failure_bound=failure_bound if failure_bound is not None else _mul_bound(circuit, target),
        target_secret=lambda sk2: sk2.target,
    )


def compile_hp_variant(
    source: EncryptionScheme,
    target: HomomorphicScheme,
    dec_circuit: DecCircuit,
    embedding: Optional[PlaintextEmbedding] = None,
    name: Optional[str] = None,
    fresh_inputs: bool = False,
) -> Bridge:
    """Bridge into the product of p copies of an F2 target, one per output bit g_i.

    The bridge key repeats the key-entry encryptions under every component key.
    """
    if target.ring.p != 2:
        raise ParameterError(f"product variant needs an F2 target, got {target.ring}")
    width = dec_circuit.num_outputs
    product = power_scheme(target, width)
    if embedding is None:
        embedding = PlaintextEmbedding.bits(source.plaintext_space, product.plaintext_space)
    circuit = _prepare(dec_circuit.circuit, target, normalize=False)
    components = [circuit.restrict([i]) for i in range(width)]

    def derive_target(sk1: Any, pk1: Any, rng: Rng) -> KeyPair:
        keys = product.keygen(rng)
        return KeyPair(GentrySecretKey(sk1, keys.sk), keys.pk, keys.evk)

    def derive_bridge_key(sk1: Any, pk1: Any, keys: KeyPair, rng: Rng) -> Tuple[GentryBridgeKey, ...]:
        entries = dec_circuit.key_entries(sk1, rng)
        return tuple(
            GentryBridgeKey(tuple(target.enc(pk, e, rng) for e in entries), evk)
            for pk, evk in zip(keys.pk, keys.evk)
        )

    def map_f(public: BridgePublicKey, c: Any, rng: Rng) -> Tuple[Any, ...]:
        bits = dec_circuit.cipher_bits(c)
        out = []
        for index, (bk, component) in enumerate(zip(public.bk, components)):
            if fresh_inputs:
                lifted = [target.enc(public.pk2[index], b, rng) for b in bits]
            else:
                lifted = [target.trivial(bk.evk, b) for b in bits]
            out.append(target.eval(bk.evk, component, list(bk.entries) + lifted, rng)[0])
        return tuple(out)

    return Bridge(
        name=name or f"gentry-{source.name}-{target.name}^{width}",
        source=source,
        target=product,
        embedding=embedding,
        derive_target=derive_target,
        derive_bridge_key=derive_bridge_key,
        map_f=map_f,
        failure_bound=min(1.0, width * _mul_bound(circuit, target)),
        target_secret=lambda sk2: sk2.target,
    )


def csgn_dec_circuit(n: int) -> DecCircuit:
    """Boolean circuit AND_i NOT(k_i AND NOT c_i) over the characteristic vector k of S."""
    circuit = Circuit(2 * n, name=f"csgn-dec-{n}")
    key, cipher = circuit.inputs[:n], circuit.inputs[n:]
    factors = [circuit.not_(circuit.and_(k, circuit.not_(c))) for k, c in zip(key, cipher)]
    circuit.set_outputs(circuit.reduce(GateKind.AND, factors))
    return DecCircuit(
        circuit,
        key_size=n,
        cipher_size=n,
        encode_key=lambda sk, rng: [int(b) for b in sk.subset],
        encode_ciphertext=lambda c: [int(b) for b in c.bits],
        name=circuit.name,
    )


def product_dec_circuit(parts: Sequence[DecCircuit]) -> DecCircuit:
    """Decryption circuit of a product scheme: all key entries first, then all ciphertext bits."""
    if not parts:
        raise ParameterError("product decryption circuit needs at least one factor")
    key_size = sum(p.key_size for p in parts)
    cipher_size = sum(p.cipher_size for p in parts)
    circuit = Circuit(key_size + cipher_size, name="x".join(p.name for p in parts))
    key_pos, cipher_pos = 0, key_size
    outputs = []
    for part in parts:
        wires = circuit.inputs[key_pos:key_pos + part.key_size] + circuit.inputs[cipher_pos:cipher_pos + part.cipher_size]
        outputs.extend(circuit.embed(part.circuit, wires))
        key_pos += part.key_size
        cipher_pos += part.cipher_size
    circuit.set_outputs(*outputs)

    def encode_key(sk: Tuple[Any, ...], rng: Rng) -> List[int]:
        return [e for part, k in zip(parts, sk) for e in part.key_entries(k, rng)]

    def encode_ciphertext(c: Tuple[Any, ...]) -> List[int]:
        return [b for part, x in zip(parts, c) for b in part.cipher_bits(x)]

    return DecCircuit(circuit, key_size, cipher_size, encode_key, encode_ciphertext, name=circuit.name)


def gm_table_dec_circuit(n_bits: int) -> DecCircuit:
    """Toy GM decryption by table lookup.

    The key is the decryption truth table over all ``n_bits``-bit residues
    (0 where the residue is not a ciphertext). The ciphertext enters as its
    ``n_bits`` bits, most significant first. Only sensible for tiny moduli.
    """
    if not 2 <= n_bits <= 12:
        raise ParameterError(f"table decryption is limited to 2..12 bit moduli, got {n_bits}")
    size = 1 << n_bits
    circuit = Circuit(size + n_bits, name=f"gm-table-{n_bits}")
    table, cipher = circuit.inputs[:size], circuit.inputs[size:]
    negated = [circuit.not_(c) for c in cipher]
    terms = []
    for r in range(size):
        literals = [cipher[j] if (r >> (n_bits - 1 - j)) & 1 else negated[j] for j in range(n_bits)]
        terms.append(circuit.and_(table[r], circuit.reduce(GateKind.AND, literals)))
    circuit.set_outputs(circuit.reduce(GateKind.XOR, terms))

    def encode_key(sk: GmSecretKey, rng: Rng) -> List[int]:
        n = sk.n
        if n >= size:
            raise KeyMismatchError(f"modulus {n} does not fit in {n_bits} bits")
        entries = []
        for r in range(size):
            if r < n and gmpy2.gcd(r, n) == 1 and jacobi(r, n) == 1:
                entries.append(gm_dec(sk, GmCiphertext(r)))
            else:
                entries.append(0)
        return entries

    def encode_ciphertext(c: GmCiphertext) -> List[int]:
        if not 0 <= c.value < size:
            raise KeyMismatchError(f"ciphertext does not fit in {n_bits} bits")
        return [(c.value >> (n_bits - 1 - j)) & 1 for j in range(n_bits)]

    return DecCircuit(circuit, size, n_bits, encode_key, encode_ciphertext, name=circuit.name)


def gm_table_bridge(source: GmScheme, target: Optional[HomomorphicScheme] = None) -> Bridge:
    """GM with fixed toy primes into a homomorphic target (mock F2 by default)."""
    if source.fixed_primes is None:
        raise ParameterError("table bridge needs a GM scheme with fixed toy primes")
    target = target if target is not None else MockFheScheme(2)
    n_bits = (source.fixed_primes[0] * source.fixed_primes[1]).bit_length()
    return compile_gentry_bridge(
        source,
        target,
        PlaintextEmbedding(F2, target.ring, lambda m: m),
        gm_table_dec_circuit(n_bits),
        name=f"gm-table-{target.name}",
    )


def standard_vector_dec_circuit(n: int, s: int) -> DecCircuit:
    """prod_{i in S} <c, e_i>: key entries are the standard vectors e_i for i in S."""
    circuit = Circuit(s * n + n, name=f"csgn-1-{n}-{s}")
    cipher = circuit.inputs[s * n:]
    factors = []
    for i in range(s):
        row = circuit.inputs[i * n:(i + 1) * n]
        factors.append(circuit.reduce(GateKind.ADD, [circuit.mul(c, k) for c, k in zip(cipher, row)]))
    circuit.set_outputs(circuit.reduce(GateKind.MUL, factors))

    def encode_key(sk: CsgnKey, rng: Rng) -> List[int]:
        entries = []
        for i in sk.indices():
            entries.extend(1 if j == i else 0 for j in range(n))
        return entries

    return DecCircuit(
        circuit, s * n, n, encode_key, lambda c: [int(b) for b in c.bits], name=circuit.name
    )


def fermat_dec_circuit(n: int, p: int, encode_key: Callable[[Any, Rng], Sequence[int]]) -> DecCircuit:
    """1 - (1 + <c, k>)^(p-1) over F_p."""
    circuit = Circuit(2 * n, name=f"csgn-3-{n}-f{p}")
    key, cipher = circuit.inputs[:n], circuit.inputs[n:]
    inner = circuit.reduce(GateKind.ADD, [circuit.mul(c, k) for c, k in zip(cipher, key)])
    one = circuit.const(1)
    circuit.set_outputs(circuit.sub(one, circuit.pow(circuit.add(one, inner), p - 1)))
    return DecCircuit(circuit, n, n, encode_key, lambda c: [int(b) for b in c.bits], name=circuit.name)


def _bit_embedding(target: HomomorphicScheme) -> PlaintextEmbedding:
    return PlaintextEmbedding(F2, target.ring, lambda m: m)


def _check_csgn_ciphertext(source: CsgnScheme, c: CsgnCiphertext) -> np.ndarray:
    if not isinstance(c, CsgnCiphertext) or c.n != source.n:
        raise KeyMismatchError(f"expected a CSGN ciphertext of length {source.n}")
    return c.bits


def csgn_bridge_1(source: CsgnScheme, target: HomomorphicScheme, fresh_inputs: bool = False) -> Bridge:
    """Bridge key: encrypted standard vectors e_i, i in S; f = prod_i <c~, e~_i>."""
    return compile_gentry_bridge(
        source,
        target,
        _bit_embedding(target),
        standard_vector_dec_circuit(source.n, source.s),
        name=f"csgn-1-{target.name}",
        fresh_inputs=fresh_inputs,
        normalize=False,
    )


def csgn_bridge_2(source: CsgnScheme, target: HomomorphicScheme, balanced: bool = True) -> Bridge:
    """Bridge key: encryptions of 1 - sk[i]; f multiplies the entries at the zeros of c.

    Only multiplication is needed, so SYY and CSGN itself qualify as targets.
    An all-ones ciphertext maps to an encryption of 1.
    """
    if GateKind.MUL not in target.supported_gates:
        raise ParameterError(f"{target.name} cannot multiply ciphertexts")
    failure = min(1.0, max(source.d - 1, 0) * target.mul_failure_bound)

    def derive_bridge_key(sk1: CsgnKey, pk1: Any, keys: KeyPair, rng: Rng) -> GentryBridgeKey:
        entries = [1 - int(b) for b in sk1.subset]
        one = _encrypt_entries(target, keys, [1], rng)[0] if target.symmetric else None
        return GentryBridgeKey(_encrypt_entries(target, keys, entries, rng), keys.evk, one)

    def map_f(public: BridgePublicKey, c: CsgnCiphertext, rng: Rng) -> Any:
        bk: GentryBridgeKey = public.bk
        zeros = [int(i) for i in np.flatnonzero(_check_csgn_ciphertext(source, c) == 0)]
        if not zeros:
            return bk.one if bk.one is not None else target.enc(public.pk2, 1, rng)
        if len(zeros) == 1:
            return bk.entries[zeros[0]]
        circuit = product_circuit(len(zeros), balanced)
        return target.eval(bk.evk, circuit, [bk.entries[i] for i in zeros], rng)[0]

    return Bridge(
        name=f"csgn-2-{target.name}",
        source=source,
        target=target,
        embedding=_bit_embedding(target),
        derive_target=_target_keys(target),
        derive_bridge_key=derive_bridge_key,
        map_f=map_f,
        failure_bound=failure,
        target_secret=lambda sk2: sk2.target,
    )


def default_composition(s: int, p: int) -> Tuple[int, ...]:
    """(1, ..., 1, p - s): s positive parts summing to p - 1."""
    return (1,) * (s - 1) + (p - s,)


def csgn_bridge_3(
    source: CsgnScheme,
    target: Optional[HomomorphicScheme] = None,
    composition: Optional[Sequence[int]] = None,
) -> Bridge:
    """f = 1 - (1 + <c, sk>)^(p-1) over F_p with p > s.

    sk[i] = x_phi(i) on S for a random bijection phi: S -> 1..s, 0 elsewhere, so
    <c, sk> = p - 1 exactly when c keeps every coordinate of S. Without a
    target, a mock backend over the smallest prime above s is used.
    """
    s = source.s
    if target is None:
        target = MockFheScheme(int(gmpy2.next_prime(s)))
    p = target.ring.p
    if p <= s or not is_probable_prime(p):
        raise ParameterError(f"third CSGN bridge needs a prime p > s={s}, got {p}")
    xs = tuple(composition) if composition is not None else default_composition(s, p)
    if len(xs) != s or any(x < 1 for x in xs) or sum(xs) != p - 1:
        raise ParameterError(f"composition must be {s} positive integers summing to {p - 1}, got {xs}")

    def encode_key(sk: CsgnKey, rng: Rng) -> List[int]:
        order = list(range(s))
        rng.shuffle(order)
        entries = [0] * source.n
        for slot, i in zip(order, sk.indices()):
            entries[i] = xs[slot]
        return entries

    dec = fermat_dec_circuit(source.n, p, encode_key)
    return compile_gentry_bridge(source, target, _bit_embedding(target), dec, name=f"csgn-3-{target.name}", normalize=False)


def shift_matrix(m: int) -> np.ndarray:
    """Cyclic shift with entry (i, i+1 mod m) set."""
    out = np.zeros((m, m), dtype=np.uint8)
    for i in range(m):
        out[i, (i + 1) % m] = 1
    return out


def circulant_from_first_column(column: Sequence[int]) -> np.ndarray:
    """A[i][j] = column[(i - j) mod m]."""
    col = np.asarray(column, dtype=np.uint8)
    m = col.shape[0]
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return col[idx]


@lru_cache(maxsize=256)
def circulant_product_circuit(m: int, count: int) -> Circuit:
    """Entry (0, 1) of the 0-indexed product column of ``count`` m x m circulants.

    Input block t holds the first column of the t-th factor. Products are
    cyclic convolutions combined in a balanced tree.
    """
    circuit = Circuit(m * count, name=f"circulant-{m}x{count}")
    columns = [circuit.inputs[t * m:(t + 1) * m] for t in range(count)]
    while len(columns) > 1:
        merged = []
        for a, b in zip(columns[0::2], columns[1::2]):
            merged.append([
                circuit.reduce(GateKind.ADD, [circuit.mul(a[u], b[(k - u) % m]) for u in range(m)])
                for k in range(m)
            ])
        if len(columns) % 2:
            merged.append(columns[-1])
        columns = merged
    return circuit.set_outputs(columns[0][1])


def csgn_bridge_4(source: CsgnScheme, target: HomomorphicScheme) -> Bridge:
    """Encode sk[i] as the cyclic shift (i in S) or the identity in Z_{s+1}.

    f multiplies the encrypted matrices at the ones of c and returns entry
    (0, s) of the product, i.e. entry 1 of its first column. That entry is 1
    exactly when all s coordinates of S survive.
    """
    if target.ring.p != 2:
        raise ParameterError(f"fourth CSGN bridge needs an F2 target, got {target.ring}")
    m = source.s + 1
    shift_col = tuple(int(v) for v in shift_matrix(m)[:, 0])
    identity_col = (1,) + (0,) * (m - 1)

    def derive_bridge_key(sk1: CsgnKey, pk1: Any, keys: KeyPair, rng: Rng) -> GentryBridgeKey:
        entries = tuple(
            _encrypt_entries(target, keys, shift_col if bit else identity_col, rng) for bit in sk1.subset
        )
        return GentryBridgeKey(entries, keys.evk)

    def map_f(public: BridgePublicKey, c: CsgnCiphertext, rng: Rng) -> Any:
        bk: GentryBridgeKey = public.bk
        selected = [int(i) for i in np.flatnonzero(_check_csgn_ciphertext(source, c) == 1)]
        if not selected:
            return target.trivial(bk.evk, identity_col[1])
        inputs = [ct for i in selected for ct in bk.entries[i]]
        return target.eval(bk.evk, circulant_product_circuit(m, len(selected)), inputs, rng)[0]

    return Bridge(
        name=f"csgn-4-{target.name}",
        source=source,
        target=target,
        embedding=_bit_embedding(target),
        derive_target=_target_keys(target),
        derive_bridge_key=derive_bridge_key,
        map_f=map_f,
        failure_bound=0.0,
        target_secret=lambda sk2: sk2.target,
    )
