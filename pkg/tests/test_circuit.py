import pytest

from bridgecraft.errors import ParameterError
from bridgecraft.schemes.base import F2, ModularRing, ProductSpace, power_scheme
from bridgecraft.schemes.circuit import (
    Circuit,
    GateKind,
    eval_circuit_plain,
    product_circuit,
    random_boolean_circuit,
)
from bridgecraft.schemes.mockfhe import MockFheScheme


def test_product_circuit_depth():
    assert product_circuit(8).depth() == 3
    assert product_circuit(8, balanced=False).depth() == 7
    assert product_circuit(1).depth() == 0


def test_product_circuit_evaluates():
    ring = ModularRing(7)
    assert eval_circuit_plain(product_circuit(3), ring, [2, 3, 4]) == [24 % 7]


def test_pow_and_const():
    c = Circuit(1)
    out = c.sub(c.pow(c.input(0), 6), c.const(1))
    c.set_outputs(out)
    ring = ModularRing(7)
    # Fermat: x^6 = 1 for x != 0
    assert [eval_circuit_plain(c, ring, [x])[0] for x in range(7)] == [6, 0, 0, 0, 0, 0, 0]
    assert c.depth() == 3


def test_constants_are_shared():
    c = Circuit(2)
    assert c.const(1) == c.const(1)
    assert c.not_(c.input(0)) != c.not_(c.input(1))


def test_bad_wires_rejected():
    c = Circuit(2)
    with pytest.raises(ParameterError):
        c.add(0, 7)
    with pytest.raises(ParameterError):
        c.set_outputs(42)
    with pytest.raises(ParameterError):
        c.pow(0, -1)
    with pytest.raises(ParameterError):
        c.reduce(GateKind.MUL, [])


def test_boolean_gates_need_f2():
    c = Circuit(2)
    c.set_outputs(c.xor(0, 1))
    assert eval_circuit_plain(c, F2, [1, 1]) == [0]
    with pytest.raises(ParameterError):
        eval_circuit_plain(c, ModularRing(5), [1, 1])


def test_embed_and_restrict():
    inner = Circuit(2)
    inner.set_outputs(inner.mul(0, 1), inner.add(0, 1))
    outer = Circuit(3)
    first, second = outer.embed(inner, [outer.input(0), outer.input(2)])
    outer.set_outputs(first, second)
    ring = ModularRing(11)
    assert eval_circuit_plain(outer, ring, [3, 9, 5]) == [4, 8]
    assert eval_circuit_plain(outer.restrict([1]), ring, [3, 9, 5]) == [8]


def test_dict_round_trip(rng):
    circuit = random_boolean_circuit(4, 20, rng)
    again = Circuit.from_dict(circuit.to_dict())
    for x in range(16):
        bits = [(x >> k) & 1 for k in range(4)]
        assert eval_circuit_plain(again, F2, bits) == eval_circuit_plain(circuit, F2, bits)


def test_from_dict_rejects_garbage():
    with pytest.raises(ParameterError):
        Circuit.from_dict({"num_inputs": 1, "gates": [{"id": 0, "kind": "INPUT", "args": [0]}, {"id": 1, "kind": "NAND", "args": [0, 0]}], "outputs": [1]})
    with pytest.raises(ParameterError):
        Circuit.from_dict({"gates": []})


def _two_inputs_then(gate):
    return {
        "num_inputs": 2,
        "gates": [
            {"id": 0, "kind": "INPUT", "args": [0]},
            {"id": 1, "kind": "INPUT", "args": [1]},
            dict(gate, id=2),
        ],
        "outputs": [2],
    }


@pytest.mark.parametrize(
    "gate",
    [
        {"kind": "POW", "args": [0]},
        {"kind": "POW", "args": []},
        {"kind": "CONST", "args": []},
        {"kind": "CONST", "args": [1, 2]},
        {"kind": "MUL", "args": [0]},
        {"kind": "ADD", "args": [0, 1, 1]},
        {"kind": "XOR", "args": []},
    ],
)
def test_from_dict_checks_gate_arity(gate):
    with pytest.raises(ParameterError, match="arguments"):
        Circuit.from_dict(_two_inputs_then(gate))


def test_from_dict_accepts_well_formed_gates():
    circuit = Circuit.from_dict(_two_inputs_then({"kind": "MUL", "args": [0, 1]}))
    assert eval_circuit_plain(circuit, ModularRing(5), [2, 3]) == [1]
    circuit = Circuit.from_dict(_two_inputs_then({"kind": "POW", "args": [0, 3]}))
    assert eval_circuit_plain(circuit, ModularRing(7), [2, 0]) == [1]


def test_check_circuit_rejects_unsupported_gates():
    target = MockFheScheme(2)
    circuit = Circuit(1)
    circuit.set_outputs(circuit.input(0))
    target.check_circuit(circuit)
    from bridgecraft.schemes.syy import SyyScheme

    c = Circuit(2)
    c.set_outputs(c.add(0, 1))
    with pytest.raises(ParameterError):
        SyyScheme(64, 4).check_circuit(c)


def test_plaintext_spaces():
    ring = ModularRing(5)
    assert ring.encode(4) == (1, 0, 0)
    assert ring.decode((0, 1, 1)) == 3
    with pytest.raises(ParameterError):
        ring.decode((1, 1, 1))
    space = ProductSpace([F2, ring])
    assert space.encode((1, 2)) == (1, 0, 1, 0)
    assert space.decode((1, 0, 1, 0)) == (1, 2)
    assert len(space.elements()) == 10
    assert not space.contains((1, 5))


def test_power_scheme_is_componentwise(rng):
    scheme = power_scheme(MockFheScheme(2), 3)
    keys = scheme.keygen(rng)
    c = scheme.enc(keys.pk, (1, 0, 1), rng)
    assert scheme.dec(keys.sk, c) == (1, 0, 1)
    with pytest.raises(ParameterError):
        power_scheme(MockFheScheme(2), 0)
