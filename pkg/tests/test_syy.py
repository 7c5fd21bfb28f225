import itertools
import random

import numpy as np
import pytest
from scipy import stats

from bridgecraft.errors import KeyMismatchError, MalformedCiphertextError, ParameterError
from bridgecraft.schemes.circuit import product_circuit
from bridgecraft.schemes.gm import gm_enc
from bridgecraft.schemes.syy import (
    SyyCiphertext,
    SyyPublicKey,
    SyyScheme,
    and_failure_bound,
    and_failure_probability,
    syy_and,
    syy_dec,
    syy_decrypt_vector,
    syy_enc,
    syy_trivial,
)
from bridgecraft.utils.numtheory import GF2Matrix, gf2_rank


def _syy_key(toy_gm, ell):
    sk, pk = toy_gm
    return sk, SyyPublicKey(pk.n, pk.gamma, ell)


def _encrypt_vector(pk, vector, rng):
    return SyyCiphertext(tuple(gm_enc(pk.gm, v, rng).value for v in vector))


def _gl2():
    out = []
    for entries in itertools.product((0, 1), repeat=4):
        bits = np.array(entries, dtype=np.uint8).reshape(2, 2)
        if gf2_rank(bits) == 2:
            out.append(GF2Matrix(bits, nonsingular=True))
    return out


def test_round_trip(toy_gm, rng):
    sk, pk = _syy_key(toy_gm, 6)
    for m in (0, 1):
        for _ in range(200):
            c = syy_enc(pk, m, rng)
            assert c.ell == 6
            assert syy_dec(sk, c) == m


def test_one_is_the_zero_vector(toy_gm, rng):
    sk, pk = _syy_key(toy_gm, 5)
    assert not syy_decrypt_vector(sk, syy_enc(pk, 1, rng)).any()
    assert syy_decrypt_vector(sk, syy_enc(pk, 0, rng)).any()


def test_and_failure_exhaustive_over_gl2(toy_gm, rng):
    sk, pk = _syy_key(toy_gm, 2)
    matrices = _gl2()
    assert len(matrices) == 6
    nonzero = [(1, 0), (0, 1), (1, 1)]
    failures = total = 0
    for vx, vy in itertools.product(nonzero, repeat=2):
        x = _encrypt_vector(pk, vx, rng)
        y = _encrypt_vector(pk, vy, rng)
        for a, b in itertools.product(matrices, repeat=2):
            failures += syy_dec(sk, syy_and(pk, x, y, rng, a=a, b=b))
            total += 1
    assert total == 324
    assert failures / total == pytest.approx(and_failure_probability(2))


def test_and_with_one_is_exact(toy_gm, rng):
    sk, pk = _syy_key(toy_gm, 4)
    for _ in range(200):
        y_bit = rng.getrandbits(1)
        z = syy_and(pk, syy_enc(pk, 1, rng), syy_enc(pk, y_bit, rng), rng)
        assert syy_dec(sk, z) == y_bit


@pytest.mark.parametrize("trials", [3_000, pytest.param(100_000, marks=pytest.mark.slow)])
def test_double_zero_failure_rate(toy_gm, rng, trials):
    sk, pk = _syy_key(toy_gm, 4)
    failures = sum(syy_dec(sk, syy_and(pk, syy_enc(pk, 0, rng), syy_enc(pk, 0, rng), rng)) for _ in range(trials))
    result = stats.binomtest(failures, trials, float(and_failure_probability(4)))
    assert result.pvalue > 1e-4
    assert abs(failures / trials - and_failure_probability(4)) <= 0.3 * and_failure_probability(4)
    assert and_failure_probability(4) <= and_failure_bound(4)


def test_trivial_encryptions(toy_gm):
    sk, pk = _syy_key(toy_gm, 3)
    assert syy_trivial(pk, 1).components == (1, 1, 1)
    assert syy_trivial(pk, 0).components == (pk.gamma, 1, 1)
    assert syy_dec(sk, syy_trivial(pk, 0)) == 0
    assert syy_dec(sk, syy_trivial(pk, 1)) == 1


def test_eval_product(toy_gm, rng):
    sk, pk = _syy_key(toy_gm, 16)
    scheme = SyyScheme(ell=16, fixed_primes=(7, 11))
    inputs = [syy_enc(pk, 1, rng) for _ in range(5)]
    [out] = scheme.eval(pk, product_circuit(5), inputs, rng)
    assert scheme.dec(sk, out) == 1


def test_operands_must_match_key(toy_gm, rng):
    _, pk = _syy_key(toy_gm, 3)
    short = SyyCiphertext((1, 1))
    with pytest.raises(KeyMismatchError):
        syy_and(pk, short, syy_enc(pk, 1, rng), rng)


def test_invalid_inputs(toy_gm, rng):
    sk, pk = _syy_key(toy_gm, 3)
    with pytest.raises(ParameterError):
        syy_enc(pk, 2, rng)
    with pytest.raises(MalformedCiphertextError):
        syy_dec(sk, SyyCiphertext(()))
    with pytest.raises(ParameterError):
        SyyScheme(ell=0)


def test_scheme_keys_share_the_gm_secret():
    scheme = SyyScheme(ell=8, fixed_primes=(7, 11))
    keys = scheme.keygen(random.Random(3))
    assert keys.evk == keys.pk
    again = scheme.public_key(keys.sk, random.Random(4))
    assert again.n == keys.pk.n and again.ell == 8
    assert scheme.mul_failure_bound == and_failure_bound(8)
