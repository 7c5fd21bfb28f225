import random

import numpy as np
import pytest

from bridgecraft.errors import KeyMismatchError, ParameterError
from bridgecraft.schemes.circuit import Circuit, product_circuit
from bridgecraft.schemes.csgn import (
    CsgnCiphertext,
    CsgnScheme,
    csgn_dec,
    csgn_enc,
    csgn_keygen,
    csgn_mul,
)
from bridgecraft.utils.findist import FiniteDistribution


def test_key_has_s_elements(rng):
    key = csgn_keygen(64, 8, 12, rng)
    assert key.subset.sum() == 12
    assert len(key.indices()) == 12


def test_ciphertexts_have_exactly_d_zeros(rng):
    key = csgn_keygen(64, 8, 12, rng)
    for m in (0, 1):
        for _ in range(100):
            c = csgn_enc(key, m, rng)
            assert c.zero_count() == 8
            assert csgn_dec(key, c) == m


def test_one_has_no_zeros_inside_the_subset(rng):
    key = csgn_keygen(32, 4, 8, rng)
    c = csgn_enc(key, 1, rng)
    assert c.bits[key.subset == 1].all()


def test_fixed_x_distribution(rng):
    key = csgn_keygen(32, 4, 8, rng, x_dist=FiniteDistribution.point(3))
    c = csgn_enc(key, 0, rng)
    assert int((c.bits[key.subset == 1] == 0).sum()) == 3


def test_mul_is_and(rng):
    key = csgn_keygen(128, 4, 8, rng)
    for a in (0, 1):
        for b in (0, 1):
            c = csgn_mul(csgn_enc(key, a, rng), csgn_enc(key, b, rng))
            assert csgn_dec(key, c) == a & b


def test_eval_product_circuit(rng):
    scheme = CsgnScheme(256, 8, 16)
    keys = scheme.keygen(rng)
    inputs = [scheme.enc(keys.pk, 1, rng) for _ in range(6)]
    [out] = scheme.eval(keys.evk, product_circuit(6), inputs, rng)
    assert scheme.dec(keys.sk, out) == 1
    inputs[2] = scheme.enc(keys.pk, 0, rng)
    [out] = scheme.eval(keys.evk, product_circuit(6), inputs, rng)
    assert scheme.dec(keys.sk, out) == 0


def test_scheme_is_symmetric(rng):
    scheme = CsgnScheme(64, 8, 8)
    keys = scheme.keygen(rng)
    assert scheme.symmetric
    assert keys.sk is keys.pk
    assert keys.evk == 64
    assert sum(scheme.secret_key_bits(keys.sk)) == 8


def test_trivial_constants(rng):
    scheme = CsgnScheme(64, 8, 8)
    keys = scheme.keygen(rng)
    assert scheme.dec(keys.sk, scheme.trivial(keys.evk, 1)) == 1
    assert scheme.dec(keys.sk, scheme.trivial(keys.evk, 0)) == 0


@pytest.mark.parametrize(
    "n,d,s",
    [(10, 0, 4), (10, 11, 4), (10, 4, 0), (10, 6, 5), (10, 4, 2)],
)
def test_parameter_validation(n, d, s):
    # the last case lets X put up to d=4 zeros in a subset of size 2
    with pytest.raises(ParameterError):
        CsgnScheme(n, d, s)


def test_length_mismatch(rng):
    key = csgn_keygen(32, 4, 8, rng)
    with pytest.raises(KeyMismatchError):
        csgn_dec(key, CsgnCiphertext(np.ones(16, dtype=np.uint8)))
    with pytest.raises(KeyMismatchError):
        csgn_mul(CsgnCiphertext(np.ones(16, dtype=np.uint8)), CsgnCiphertext(np.ones(8, dtype=np.uint8)))


def test_rejects_additive_circuits(rng):
    scheme = CsgnScheme(64, 8, 8)
    c = Circuit(2)
    c.set_outputs(c.add(0, 1))
    with pytest.raises(ParameterError):
        scheme.eval(64, c, [CsgnCiphertext(np.ones(64, dtype=np.uint8))] * 2, random.Random(0))
