"""Circuits as data.

A circuit is a list of gates in topological order; every gate only refers to
earlier gate ids, so a well-formed circuit is acyclic by construction. Boolean
circuits use XOR/AND, ring circuits ADD/SUB/MUL/POW; INPUT and CONST appear in
both. The same gate walk evaluates plaintexts, homomorphic ciphertexts and
multiplicative depth, through a ``GateOps`` implementation.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from bridgecraft.errors import ParameterError
from bridgecraft.schemes.base import ModularRing

logger = logging.getLogger("bridgecraft.schemes.circuit")


class GateKind(str, Enum):
    INPUT = "INPUT"
    CONST = "CONST"
    XOR = "XOR"
    AND = "AND"
    ADD = "ADD"
    SUB = "SUB"
    MUL = "MUL"
    POW = "POW"


BOOLEAN_GATES = frozenset({GateKind.XOR, GateKind.AND})
RING_GATES = frozenset({GateKind.ADD, GateKind.SUB, GateKind.MUL, GateKind.POW})
BINARY_GATES = BOOLEAN_GATES | {GateKind.ADD, GateKind.SUB, GateKind.MUL}
GATE_ARITY = {kind: 2 for kind in BINARY_GATES} | {GateKind.INPUT: 1, GateKind.CONST: 1, GateKind.POW: 2}


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    args: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "kind": self.kind.value, "args": list(self.args)}


class Circuit:
    """Builder and container for a gate DAG."""

    def __init__(self, num_inputs: int, name: str = ""):
        if num_inputs < 0:
            raise ParameterError(f"number of inputs must be nonnegative, got {num_inputs}")
        self.name = name
        self.num_inputs = num_inputs
        self.gates: List[Gate] = []
        self.outputs: List[int] = []
        self._consts: Dict[int, int] = {}
        self.inputs = [self._emit(GateKind.INPUT, (i,)) for i in range(num_inputs)]

    def __len__(self) -> int:
        return len(self.gates)

    def __repr__(self) -> str:
        return f"Circuit({self.name!r}, inputs={self.num_inputs}, gates={len(self.gates)}, outputs={len(self.outputs)})"

    def _emit(self, kind: GateKind, args: Tuple[int, ...]) -> int:
        gate_id = len(self.gates)
        expected = GATE_ARITY[kind]
        if len(args) != expected:
            raise ParameterError(f"{kind.value} gate takes {expected} arguments, got {len(args)}")
        if kind in BINARY_GATES:
            for a in args:
                if not 0 <= a < gate_id:
                    raise ParameterError(f"{kind.value} gate refers to unknown wire {a}")
        elif kind is GateKind.POW:
            if not 0 <= args[0] < gate_id:
                raise ParameterError(f"POW gate refers to unknown wire {args[0]}")
            if args[1] < 0:
                raise ParameterError(f"POW exponent must be nonnegative, got {args[1]}")
        self.gates.append(Gate(gate_id, kind, tuple(args)))
        return gate_id

    def input(self, index: int) -> int:
        return self.inputs[index]

    def const(self, value: int) -> int:
        if value not in self._consts:
            self._consts[value] = self._emit(GateKind.CONST, (value,))
        return self._consts[value]

    def add(self, a: int, b: int) -> int:
        return self._emit(GateKind.ADD, (a, b))

    def sub(self, a: int, b: int) -> int:
        return self._emit(GateKind.SUB, (a, b))

    def mul(self, a: int, b: int) -> int:
        return self._emit(GateKind.MUL, (a, b))

    def pow(self, a: int, exponent: int) -> int:
        return self._emit(GateKind.POW, (a, exponent))

    def xor(self, a: int, b: int) -> int:
        return self._emit(GateKind.XOR, (a, b))

    def and_(self, a: int, b: int) -> int:
        return self._emit(GateKind.AND, (a, b))

    def not_(self, a: int) -> int:
        return self.xor(a, self.const(1))

    def reduce(self, kind: GateKind, wires: Sequence[int]) -> int:
        """Combine ``wires`` with a balanced tree of binary ``kind`` gates."""
        if kind not in BINARY_GATES:
            raise ParameterError(f"cannot reduce with {kind}")
        layer = list(wires)
        if not layer:
            raise ParameterError("cannot reduce an empty list of wires")
        while len(layer) > 1:
            nxt = [self._emit(kind, (layer[i], layer[i + 1])) for i in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]

    def fold(self, kind: GateKind, wires: Sequence[int]) -> int:
        """Left fold ``((w0 . w1) . w2) ...``."""
        if not wires:
            raise ParameterError("cannot fold an empty list of wires")
        acc = wires[0]
        for w in wires[1:]:
            acc = self._emit(kind, (acc, w))
        return acc

    def set_outputs(self, *wires: int) -> "Circuit":
        for w in wires:
            if not 0 <= w < len(self.gates):
                raise ParameterError(f"output refers to unknown wire {w}")
        self.outputs = list(wires)
        return self

    def embed(self, other: "Circuit", wires: Sequence[int]) -> List[int]:
        """Copy ``other`` into this circuit with its inputs bound to ``wires``.

        Returns the ids of ``other``'s outputs inside this circuit.
        """
        if len(wires) != other.num_inputs:
            raise ParameterError(f"embedding needs {other.num_inputs} wires, got {len(wires)}")
        mapping: Dict[int, int] = {}
        for gate in other.gates:
            if gate.kind is GateKind.INPUT:
                mapping[gate.id] = wires[gate.args[0]]
            elif gate.kind is GateKind.CONST:
                mapping[gate.id] = self.const(gate.args[0])
            elif gate.kind is GateKind.POW:
                mapping[gate.id] = self.pow(mapping[gate.args[0]], gate.args[1])
            else:
                mapping[gate.id] = self._emit(gate.kind, tuple(mapping[a] for a in gate.args))
        return [mapping[o] for o in other.outputs]

    def restrict(self, indices: Sequence[int]) -> "Circuit":
        """Same gates, keeping only the selected outputs."""
        copy = Circuit.__new__(Circuit)
        copy.name = self.name
        copy.num_inputs = self.num_inputs
        copy.gates = list(self.gates)
        copy.inputs = list(self.inputs)
        copy._consts = dict(self._consts)
        copy.outputs = [self.outputs[i] for i in indices]
        return copy

    def kinds(self) -> Set[GateKind]:
        return {g.kind for g in self.gates} - {GateKind.INPUT, GateKind.CONST}

    @property
    def is_boolean(self) -> bool:
        return not (self.kinds() & RING_GATES)

    def depth(self) -> int:
        """Multiplicative depth of the deepest output, counting POW as square-and-multiply."""
        if not self.outputs:
            return 0
        return max(evaluate(self, [0] * self.num_inputs, DepthOps()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "num_inputs": self.num_inputs,
            "gates": [g.to_dict() for g in self.gates],
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Circuit":
        try:
            circuit = cls(int(data["num_inputs"]), name=str(data.get("name", "")))
            for raw in data["gates"][circuit.num_inputs:]:
                kind = GateKind(raw["kind"])
                args = tuple(int(a) for a in raw["args"])
                if int(raw["id"]) != len(circuit.gates):
                    raise ParameterError(f"gate ids must be consecutive, got {raw['id']}")
                if kind is GateKind.INPUT:
                    raise ParameterError("INPUT gates must come first")
                gate_id = circuit._emit(kind, args)
                if kind is GateKind.CONST:
                    circuit._consts.setdefault(args[0], gate_id)
            circuit.set_outputs(*(int(o) for o in data["outputs"]))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParameterError):
                raise
            raise ParameterError(f"malformed circuit description: {e}") from e
        return circuit


class GateOps:
    """Gate semantics for one value domain. Unsupported gates raise."""

    def const(self, value: int) -> Any:
        raise ParameterError(f"{type(self).__name__} has no constants")

    def add(self, a: Any, b: Any) -> Any:
        raise ParameterError(f"{type(self).__name__} cannot add")

    def sub(self, a: Any, b: Any) -> Any:
        raise ParameterError(f"{type(self).__name__} cannot subtract")

    def mul(self, a: Any, b: Any) -> Any:
        raise ParameterError(f"{type(self).__name__} cannot multiply")

    def xor(self, a: Any, b: Any) -> Any:
        raise ParameterError(f"{type(self).__name__} has no XOR gate")

    def and_(self, a: Any, b: Any) -> Any:
        raise ParameterError(f"{type(self).__name__} has no AND gate")


class RingOps(GateOps):
    """Plaintext evaluation in Z/pZ; boolean gates only over F2."""

    def __init__(self, ring: ModularRing):
        self.ring = ring

    def const(self, value: int) -> int:
        return value % self.ring.p

    def add(self, a: int, b: int) -> int:
        return self.ring.add(a, b)

    def sub(self, a: int, b: int) -> int:
        return self.ring.sub(a, b)

    def mul(self, a: int, b: int) -> int:
        return self.ring.mul(a, b)

    def xor(self, a: int, b: int) -> int:
        self._boolean_only()
        return a ^ b

    def and_(self, a: int, b: int) -> int:
        self._boolean_only()
        return a & b

    def _boolean_only(self):
        if self.ring.p != 2:
            raise ParameterError(f"boolean gates need F2, not {self.ring}")


class DepthOps(GateOps):
    def const(self, value: int) -> int:
        return 0

    def add(self, a: int, b: int) -> int:
        return max(a, b)

    sub = add
    xor = add

    def mul(self, a: int, b: int) -> int:
        return max(a, b) + 1

    and_ = mul


def square_and_multiply(ops: GateOps, x: Any, exponent: int) -> Any:
    if exponent == 0:
        return ops.const(1)
    result: Optional[Any] = None
    base = x
    e = exponent
    while True:
        if e & 1:
            result = base if result is None else ops.mul(result, base)
        e >>= 1
        if not e:
            return result
        base = ops.mul(base, base)


def evaluate(circuit: Circuit, inputs: Sequence[Any], ops: GateOps) -> List[Any]:
    """Walk the gates in order and return the output values."""
    if len(inputs) != circuit.num_inputs:
        raise ParameterError(f"circuit takes {circuit.num_inputs} inputs, got {len(inputs)}")
    wires: List[Any] = [None] * len(circuit.gates)
    for gate in circuit.gates:
        kind = gate.kind
        if kind is GateKind.INPUT:
            value = inputs[gate.args[0]]
        elif kind is GateKind.CONST:
            value = ops.const(gate.args[0])
        elif kind is GateKind.POW:
            value = square_and_multiply(ops, wires[gate.args[0]], gate.args[1])
        else:
            a, b = (wires[i] for i in gate.args)
            if kind is GateKind.ADD:
                value = ops.add(a, b)
            elif kind is GateKind.SUB:
                value = ops.sub(a, b)
            elif kind is GateKind.MUL:
                value = ops.mul(a, b)
            elif kind is GateKind.XOR:
                value = ops.xor(a, b)
            else:
                value = ops.and_(a, b)
        wires[gate.id] = value
    return [wires[o] for o in circuit.outputs]


def eval_circuit_plain(circuit: Circuit, ring: ModularRing, inputs: Sequence[int]) -> List[int]:
    """Reference evaluation over ``ring``."""
    for x in inputs:
        if not ring.contains(x):
            raise ParameterError(f"input {x!r} is not an element of {ring}")
    return evaluate(circuit, inputs, RingOps(ring))


def product_circuit(count: int, balanced: bool = True) -> Circuit:
    """x0 * x1 * ... over ``count`` inputs."""
    circuit = Circuit(count, name=f"product-{count}")
    if balanced:
        out = circuit.reduce(GateKind.MUL, circuit.inputs)
    else:
        out = circuit.fold(GateKind.MUL, circuit.inputs)
    return circuit.set_outputs(out)


def random_boolean_circuit(num_inputs: int, num_gates: int, rng) -> Circuit:
    """Random XOR/AND circuit; the last gate is the output."""
    if num_inputs < 1 or num_gates < 1:
        raise ParameterError("random circuit needs at least one input and one gate")
    circuit = Circuit(num_inputs, name="random")
    for _ in range(num_gates):
        a = rng.randrange(len(circuit.gates))
        b = rng.randrange(len(circuit.gates))
        if rng.getrandbits(1):
            circuit.xor(a, b)
        else:
            circuit.and_(a, b)
    return circuit.set_outputs(len(circuit.gates) - 1)
