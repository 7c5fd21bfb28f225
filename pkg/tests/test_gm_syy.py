import itertools
import json
import math
import random

import numpy as np
import pytest

from bridgecraft.bridges.base import check_bridge_correctness
from bridgecraft.bridges.gm_syy import (
    GmSyyBridge,
    bridge_gm_ciphertext,
    compare_eval,
    compare_failure_bound,
    gm_syy_bridge,
    gm_to_syy,
)
from bridgecraft.errors import KeyMismatchError, ParameterError
from bridgecraft.schemes.gm import GmCiphertext, gm_dec, gm_enc
from bridgecraft.schemes.syy import syy_dec
from bridgecraft.utils.numtheory import GF2Matrix, gf2_rank, jacobi
from bridgecraft.utils.serialization import dumps, loads


def _toy_keys(ell, seed=1):
    bridge = gm_syy_bridge(ell=ell, fixed_primes=(7, 11))
    return bridge, GmSyyBridge.from_material(bridge.keygen3(random.Random(seed)))


def _nonsingular(ell):
    for entries in itertools.product((0, 1), repeat=ell * ell):
        bits = np.array(entries, dtype=np.uint8).reshape(ell, ell)
        if gf2_rank(bits) == ell:
            yield GF2Matrix(bits, nonsingular=True)


def test_every_toy_ciphertext_bridges_correctly(rng):
    _, keys = _toy_keys(2)
    n = keys.gm_pk.n
    ciphertexts = [GmCiphertext(v) for v in range(1, n) if np.gcd(v, n) == 1 and jacobi(v, n) == 1]
    assert len(ciphertexts) == 30
    for c in ciphertexts:
        m = gm_dec(keys.sk, c)
        for matrix in _nonsingular(2):
            for reduce_exponents in (True, False):
                out = gm_to_syy(keys, c, rng, matrix=matrix, reduce_exponents=reduce_exponents)
                assert syy_dec(keys.sk, out) == m


@pytest.mark.parametrize(
    "toy,trials",
    [
        (False, 400),
        pytest.param(False, 10_000, marks=pytest.mark.slow),
        pytest.param(True, 10_000, marks=pytest.mark.slow),
    ],
)
def test_zero_failures(toy, trials):
    bridge = gm_syy_bridge(ell=8, fixed_primes=(7, 11)) if toy else gm_syy_bridge(bits=512, ell=8)
    report = check_bridge_correctness(bridge, trials, random.Random(6), block=min(trials, 1000))
    assert report.failures == 0
    assert bridge.failure_bound == 0.0


def test_bridge_key_is_empty_and_serializes_as_null(rng):
    bridge, keys = _toy_keys(4)
    material = bridge.keygen3(rng)
    assert material.bk is None
    assert material.sk1 is material.sk2
    data = json.loads(dumps(material))
    assert data["kind"] == "bridge-keys"
    assert data["payload"]["bk"] is None
    again = loads(dumps(material))
    assert GmSyyBridge.from_material(again) == GmSyyBridge.from_material(material)
    assert keys.to_material().bk is None


def test_syy_key_uses_a_fresh_non_residue():
    _, keys = _toy_keys(4)
    assert keys.syy_pk.n == keys.gm_pk.n
    assert keys.ell == 4


def test_foreign_ciphertext_rejected(rng):
    _, keys = _toy_keys(3)
    with pytest.raises(KeyMismatchError):
        gm_to_syy(keys, GmCiphertext(keys.gm_pk.n + 2), rng)
    with pytest.raises(KeyMismatchError):
        gm_to_syy(keys, gm_enc(keys.gm_pk, 1, rng), rng, matrix=next(_nonsingular(2)))


def _encrypt_bits(keys, bits, rng):
    return [gm_enc(keys.gm_pk, b, rng) for b in bits]


@pytest.mark.parametrize("balanced", [False, True])
def test_compare_equal_and_unequal(balanced):
    rng = random.Random(31)
    _, keys = _toy_keys(16)
    for _ in range(50):
        x = [rng.getrandbits(1) for _ in range(8)]
        y = list(x)
        cs, ds = _encrypt_bits(keys, x, rng), _encrypt_bits(keys, y, rng)
        assert syy_dec(keys.sk, compare_eval(keys, cs, ds, rng, balanced=balanced)) == 1
        y[rng.randrange(8)] ^= 1
        ds = _encrypt_bits(keys, y, rng)
        # a false "equal" needs an AND failure, at most 7 / (2^16 - 1)
        assert syy_dec(keys.sk, compare_eval(keys, cs, ds, rng, balanced=balanced)) == 0


def test_compare_argument_checks(rng):
    _, keys = _toy_keys(4)
    c = gm_enc(keys.gm_pk, 1, rng)
    with pytest.raises(ParameterError):
        compare_eval(keys, [c], [c, c], rng)
    with pytest.raises(ParameterError):
        compare_eval(keys, [], [], rng)


def test_compare_failure_bound():
    assert compare_failure_bound(1, 8) == 0.0
    assert compare_failure_bound(4, 2) == 1.0
    assert compare_failure_bound(8, 4) == pytest.approx(7 / 15)


def test_row_weight_parity_does_not_change_the_plaintext(rng):
    _, keys = _toy_keys(3)
    for _ in range(100):
        m = rng.getrandbits(1)
        c = gm_enc(keys.gm_pk, m, rng)
        full = bridge_gm_ciphertext(keys.syy_pk, c, rng, reduce_exponents=False)
        reduced = bridge_gm_ciphertext(keys.syy_pk, c, rng, reduce_exponents=True)
        assert syy_dec(keys.sk, full) == syy_dec(keys.sk, reduced) == m


def test_single_bit_differences_never_compare_equal():
    rng = random.Random(32)
    _, keys = _toy_keys(8)
    for _ in range(16):
        x = [rng.getrandbits(1) for _ in range(8)]
        cs = _encrypt_bits(keys, x, rng)
        for i in range(8):
            y = list(x)
            y[i] ^= 1
            # the one zero term is only ever ANDed with encryptions of 1, which is exact
            assert syy_dec(keys.sk, compare_eval(keys, cs, _encrypt_bits(keys, y, rng), rng)) == 0


@pytest.mark.parametrize(
    "toy,pairs",
    [(True, 2_000), pytest.param(False, 10_000, marks=pytest.mark.slow)],
)
def test_random_unequal_pairs_fail_within_bound(toy, pairs):
    rng = random.Random(33)
    if toy:
        _, keys = _toy_keys(8)
    else:
        keys = GmSyyBridge.from_material(gm_syy_bridge(bits=512, ell=8).keygen3(rng))
    failures = 0
    for _ in range(pairs):
        x = [rng.getrandbits(1) for _ in range(8)]
        y = list(x)
        while y == x:
            y = [rng.getrandbits(1) for _ in range(8)]
        verdict = syy_dec(keys.sk, compare_eval(keys, _encrypt_bits(keys, x, rng), _encrypt_bits(keys, y, rng), rng))
        failures += verdict
    bound = compare_failure_bound(8, 8)
    assert bound == pytest.approx(7 / 255)
    sigma = math.sqrt(bound * (1 - bound) / pairs)
    assert failures / pairs <= bound + 3 * sigma
