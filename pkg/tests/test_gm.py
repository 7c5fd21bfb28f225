import random

import pytest

from bridgecraft.errors import KeyMismatchError, MalformedCiphertextError, ParameterError
from bridgecraft.schemes.gm import (
    GmCiphertext,
    GmPublicKey,
    GmScheme,
    check_gm_ciphertext,
    gm_dec,
    gm_enc,
    gm_keygen,
    gm_public_key_from_secret,
    gm_rerandomize,
    gm_xor,
)
from bridgecraft.utils.numtheory import jacobi


def test_toy_round_trip(toy_gm, rng):
    sk, pk = toy_gm
    assert pk.n == 77
    for m in (0, 1):
        for _ in range(200):
            c = gm_enc(pk, m, rng)
            assert jacobi(c.value, pk.n) == 1
            assert gm_dec(sk, c) == m


def test_fixed_xi_is_deterministic(toy_gm):
    sk, pk = toy_gm
    c = gm_enc(pk, 1, random.Random(0), xi=2)
    assert c.value == pk.gamma * 4 % pk.n
    assert gm_dec(sk, c) == 1


@pytest.mark.parametrize("count", [2_000, pytest.param(10_000, marks=pytest.mark.slow)])
def test_round_trip_512_bits(count):
    rng = random.Random(2024)
    sk, pk = gm_keygen(512, rng)
    assert pk.n.bit_length() in (511, 512)
    for _ in range(count):
        m = rng.getrandbits(1)
        assert gm_dec(sk, gm_enc(pk, m, rng)) == m


def test_xor_law_exhaustive(toy_gm, rng):
    sk, pk = toy_gm
    for a in (0, 1):
        for b in (0, 1):
            for _ in range(1000):
                c = gm_xor(pk, gm_enc(pk, a, rng), gm_enc(pk, b, rng))
                assert gm_dec(sk, c) == a ^ b


def test_rerandomize_keeps_plaintext(toy_gm, rng):
    sk, pk = toy_gm
    c = gm_enc(pk, 1, rng)
    assert gm_dec(sk, gm_rerandomize(pk, c, rng)) == 1


def test_second_public_key_shares_the_secret(toy_gm, rng):
    sk, _ = toy_gm
    pk2 = gm_public_key_from_secret(sk, rng)
    assert pk2.n == sk.n
    assert GmScheme(fixed_primes=(7, 11)).valid_gamma(sk, pk2)
    assert gm_dec(sk, gm_enc(pk2, 1, rng)) == 1


def test_ciphertext_membership(toy_gm):
    _, pk = toy_gm
    with pytest.raises(KeyMismatchError):
        check_gm_ciphertext(pk, GmCiphertext(pk.n + 1))
    # 2 is a non-residue mod 11 and a residue mod 7: Jacobi symbol -1
    assert jacobi(2, 77) == -1
    with pytest.raises(MalformedCiphertextError):
        check_gm_ciphertext(pk, GmCiphertext(2))


def test_non_unit_ciphertext_rejected(toy_gm):
    sk, _ = toy_gm
    with pytest.raises(MalformedCiphertextError):
        gm_dec(sk, GmCiphertext(14))


def test_message_must_be_a_bit(toy_gm, rng):
    _, pk = toy_gm
    with pytest.raises(ParameterError):
        gm_enc(pk, 2, rng)


def test_xor_rejects_foreign_ciphertexts(toy_gm, rng):
    _, pk = toy_gm
    with pytest.raises(KeyMismatchError):
        gm_xor(pk, GmCiphertext(1), GmCiphertext(pk.n + 3))


def test_scheme_secret_key_bits():
    scheme = GmScheme(fixed_primes=(7, 11))
    keys = scheme.keygen(random.Random(1))
    assert scheme.prime_bits == 4
    assert scheme.secret_key_bits(keys.sk) == (0, 1, 1, 1)
    with pytest.raises(ParameterError):
        GmScheme(8)


def test_same_seed_same_key():
    a = gm_keygen(64, random.Random(9))
    b = gm_keygen(64, random.Random(9))
    assert a == b
    assert isinstance(a[1], GmPublicKey)
