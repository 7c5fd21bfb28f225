import random

import gmpy2
import numpy as np
import pytest

from bridgecraft.errors import KeyMismatchError, ParameterError
from bridgecraft.utils.numtheory import (
    GF2Matrix,
    find_qnr_both,
    gen_gm_modulus,
    gf2_inverse,
    gf2_mat_vec,
    gf2_rank,
    identity_gf2,
    is_probable_prime,
    jacobi,
    legendre,
    random_nonsingular_gf2,
    random_prime,
    to_gf2,
)


def test_jacobi_matches_legendre_product():
    for a in range(1, 77):
        if gmpy2.gcd(a, 77) != 1:
            assert jacobi(a, 77) == 0
            continue
        assert jacobi(a, 77) == legendre(a, 7) * legendre(a, 11)


def test_jacobi_rejects_even_modulus():
    with pytest.raises(ParameterError):
        jacobi(3, 10)
    with pytest.raises(ParameterError):
        jacobi(3, 1)


def test_legendre_squares():
    squares = {x * x % 11 for x in range(1, 11)}
    for a in range(1, 11):
        assert legendre(a, 11) == (1 if a in squares else -1)
    assert legendre(22, 11) == 0


def test_random_prime_has_exact_size(rng):
    for bits in (8, 16, 64):
        p = random_prime(bits, rng)
        assert p.bit_length() == bits
        assert is_probable_prime(p)


def test_gm_modulus_eta_is_non_residue_mod_both(rng):
    modulus = gen_gm_modulus(64, rng)
    assert modulus.n == modulus.p * modulus.q
    assert modulus.p != modulus.q
    assert legendre(modulus.eta, modulus.p) == -1
    assert legendre(modulus.eta, modulus.q) == -1
    # pseudo-square: Jacobi symbol +1 but not a square
    assert jacobi(modulus.eta, modulus.n) == 1


def test_gm_modulus_forced_primes(rng):
    modulus = gen_gm_modulus(0, rng, p=7, q=11)
    assert modulus.n == 77
    with pytest.raises(ParameterError):
        gen_gm_modulus(0, rng, p=7, q=7)
    with pytest.raises(ParameterError):
        gen_gm_modulus(0, rng, p=9, q=11)
    with pytest.raises(ParameterError):
        gen_gm_modulus(0, rng, p=7)
    with pytest.raises(ParameterError):
        gen_gm_modulus(0, rng, p=7, q=11, eta=1)


def test_gm_modulus_rejects_small_sizes(rng):
    with pytest.raises(ParameterError):
        gen_gm_modulus(8, rng)


def test_find_qnr_both_toy(rng):
    for _ in range(20):
        eta = find_qnr_both(7, 11, rng)
        assert legendre(eta, 7) == -1 and legendre(eta, 11) == -1


def test_nonsingular_sampling_and_inverse(rng):
    for dim in (1, 2, 5, 16):
        m = random_nonsingular_gf2(dim, rng)
        assert gf2_rank(m.bits) == dim
        inv = gf2_inverse(m)
        assert (m @ inv) == identity_gf2(dim)


def test_singular_matrix_has_no_inverse():
    m = GF2Matrix(to_gf2([[1, 1], [1, 1]]))
    assert gf2_rank(m.bits) == 1
    with pytest.raises(ParameterError):
        gf2_inverse(m)


def test_nonsingular_rows_have_an_odd_weight(rng):
    # A * (1,...,1) != 0 for every invertible A
    for _ in range(50):
        m = random_nonsingular_gf2(6, rng)
        assert (m.row_weights() % 2).any()


def test_mat_vec_dimension_mismatch(rng):
    m = random_nonsingular_gf2(4, rng)
    assert gf2_mat_vec(m, [0, 0, 0, 0]).tolist() == [0, 0, 0, 0]
    with pytest.raises(KeyMismatchError):
        gf2_mat_vec(m, [1, 0, 1])


def test_uniform_over_gl2():
    # GL_2(F_2) has 6 elements; each should appear about 1/6 of the time
    rng = random.Random(7)
    counts = {}
    draws = 6000
    for _ in range(draws):
        key = random_nonsingular_gf2(2, rng).bits.tobytes()
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    assert all(abs(c - draws / 6) < 150 for c in counts.values())


def test_identity_is_nonsingular():
    eye = identity_gf2(3)
    assert np.array_equal(eye.bits, np.eye(3, dtype=np.uint8))
