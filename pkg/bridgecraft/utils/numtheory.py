"""Modular arithmetic, residuosity symbols, toy prime generation and GF(2) linear algebra."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import gmpy2
import numpy as np

from bridgecraft.errors import KeyMismatchError, ParameterError, SamplingError
from bridgecraft.utils.streams import Rng

logger = logging.getLogger("bridgecraft.utils.numtheory")

MILLER_RABIN_ROUNDS = 40
MIN_GM_BITS = 16


@dataclass(frozen=True)
class GmModulus:
    """Output of :func:`gen_gm_modulus`: N = pq and a non-residue modulo both primes."""

    p: int
    q: int
    n: int
    eta: int


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 3."""
    if n < 3 or n % 2 == 0:
        raise ParameterError(f"Jacobi symbol needs an odd modulus >= 3, got {n}")
    return int(gmpy2.jacobi(a % n, n))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion; p must be an odd prime."""
    if p < 3 or p % 2 == 0:
        raise ParameterError(f"Legendre symbol needs an odd prime, got {p}")
    r = int(gmpy2.powmod(a % p, (p - 1) // 2, p))
    if r == p - 1:
        return -1
    return r


def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    if n < 2:
        return False
    return bool(gmpy2.is_prime(n, rounds))


def random_prime(bits: int, rng: Rng, max_attempts: Optional[int] = None) -> int:
    """Sample a prime with exactly ``bits`` bits."""
    if bits < 3:
        raise ParameterError(f"prime size must be at least 3 bits, got {bits}")
    attempts = max_attempts if max_attempts is not None else 100 * bits
    top = 1 << (bits - 1)
    for _ in range(attempts):
        candidate = rng.getrandbits(bits) | top | 1
        if is_probable_prime(candidate):
            return candidate
    raise SamplingError(f"a {bits}-bit prime", attempts)


def random_unit(n: int, rng: Rng, max_attempts: int = 64) -> int:
    """Uniform element of (Z/nZ)^x."""
    for _ in range(max_attempts):
        x = rng.randrange(1, n)
        if gmpy2.gcd(x, n) == 1:
            return x
    raise SamplingError(f"a unit modulo {n}", max_attempts)


def is_qnr_both(eta: int, p: int, q: int) -> bool:
    return legendre(eta, p) == -1 and legendre(eta, q) == -1


def find_qnr_both(p: int, q: int, rng: Rng, max_attempts: int = 256) -> int:
    """Sample a unit modulo pq that is a non-residue modulo p and modulo q."""
    n = p * q
    for attempt in range(1, max_attempts + 1):
        eta = random_unit(n, rng)
        if is_qnr_both(eta, p, q):
            logger.debug(f"Found eta after {attempt} attempts")
            return eta
    raise SamplingError("a non-residue modulo both primes", max_attempts)


def gen_gm_modulus(
    bit_length: int,
    rng: Rng,
    p: Optional[int] = None,
    q: Optional[int] = None,
    eta: Optional[int] = None,
    max_attempts: int = 1000,
) -> GmModulus:
    """Generate N = pq and eta with (eta/p) = (eta/q) = -1.

    Args:
        bit_length: Target size of N. Must be at least 16 unless both primes are forced.
        rng: Random stream.
        p, q: Force the primes (toy keys in tests).
        eta: Force eta; it is checked against the primes.
        max_attempts: Bound on the number of prime pairs tried before giving up.
    """
    if p is not None or q is not None:
        if p is None or q is None:
            raise ParameterError("forcing primes requires both p and q")
        for prime in (p, q):
            if prime < 3 or not is_probable_prime(prime):
                raise ParameterError(f"{prime} is not an odd prime")
        if p == q:
            raise ParameterError("p and q must be distinct")
    else:
        if bit_length < MIN_GM_BITS:
            raise ParameterError(f"bit_length must be at least {MIN_GM_BITS}, got {bit_length}")
        p_bits = bit_length // 2
        q_bits = bit_length - p_bits
        for attempt in range(1, max_attempts + 1):
            p = random_prime(p_bits, rng)
            q = random_prime(q_bits, rng)
            if p != q:
                break
        else:
            raise SamplingError("two distinct primes", max_attempts)

    n = p * q
    if eta is not None:
        if not is_qnr_both(eta, p, q) or gmpy2.gcd(eta, n) != 1:
            raise ParameterError(f"eta={eta} is not a non-residue modulo both {p} and {q}")
    else:
        eta = find_qnr_both(p, q, rng)

    logger.debug(f"Generated GM modulus of {n.bit_length()} bits")
    return GmModulus(p=int(p), q=int(q), n=int(n), eta=int(eta))


@dataclass(frozen=True, eq=False)
class GF2Matrix:
    """Square matrix over GF(2), row-major uint8 entries."""

    bits: np.ndarray
    nonsingular: bool = False

    def __post_init__(self):
        if self.bits.ndim != 2 or self.bits.shape[0] != self.bits.shape[1]:
            raise ParameterError(f"GF(2) matrix must be square, got shape {self.bits.shape}")
        self.bits.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.bits.shape[0]

    def row_weights(self) -> np.ndarray:
        return self.bits.sum(axis=1).astype(np.int64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        return GF2Matrix((self.bits.astype(np.int64) @ other.bits.astype(np.int64) % 2).astype(np.uint8))


def to_gf2(values) -> np.ndarray:
    return np.array(values, dtype=np.uint8) % 2


def identity_gf2(dim: int) -> GF2Matrix:
    return GF2Matrix(np.eye(dim, dtype=np.uint8), nonsingular=True)


def gf2_rank(bits: np.ndarray) -> int:
    """Rank over GF(2) by row reduction."""
    mat = to_gf2(bits).copy()
    rows, cols = mat.shape
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if mat[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        if pivot != rank:
            mat[[rank, pivot]] = mat[[pivot, rank]]
        for r in range(rows):
            if r != rank and mat[r, col]:
                mat[r, :] ^= mat[rank, :]
        rank += 1
        if rank == rows:
            break
    return rank


def gf2_inverse(matrix: GF2Matrix) -> GF2Matrix:
    """Gauss-Jordan inverse over GF(2)."""
    dim = matrix.dim
    aug = np.concatenate([to_gf2(matrix.bits), np.eye(dim, dtype=np.uint8)], axis=1)
    for col in range(dim):
        pivots = np.nonzero(aug[col:, col])[0]
        if pivots.size == 0:
            raise ParameterError("matrix is singular over GF(2)")
        pivot = col + int(pivots[0])
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        for r in range(dim):
            if r != col and aug[r, col]:
                aug[r, :] ^= aug[col, :]
    return GF2Matrix(aug[:, dim:].copy(), nonsingular=True)


def random_gf2_matrix(dim: int, rng: Rng) -> np.ndarray:
    """Uniform dim x dim matrix over GF(2)."""
    word = rng.getrandbits(dim * dim)
    flat = [(word >> k) & 1 for k in range(dim * dim)]
    return np.array(flat, dtype=np.uint8).reshape(dim, dim)


def random_nonsingular_gf2(dim: int, rng: Rng, max_retries: Optional[int] = None) -> GF2Matrix:
    """Uniform element of GL_dim(F_2) by rejection sampling."""
    if dim < 1:
        raise ParameterError(f"matrix dimension must be positive, got {dim}")
    retries = max_retries if max_retries is not None else 64 * dim
    for attempt in range(1, retries + 1):
        bits = random_gf2_matrix(dim, rng)
        if gf2_rank(bits) == dim:
            if attempt > 16:
                logger.warning(f"Nonsingular {dim}x{dim} matrix took {attempt} attempts")
            return GF2Matrix(bits, nonsingular=True)
    raise SamplingError(f"a nonsingular {dim}x{dim} matrix over GF(2)", retries)


def gf2_mat_vec(matrix: GF2Matrix, vector: Sequence[int]) -> np.ndarray:
    """Matrix-vector product over GF(2)."""
    vec = to_gf2(vector)
    if vec.ndim != 1 or vec.shape[0] != matrix.dim:
        raise KeyMismatchError(
            f"vector of length {vec.shape[0] if vec.ndim == 1 else vec.shape} "
            f"does not match a {matrix.dim}x{matrix.dim} matrix"
        )
    return (matrix.bits.astype(np.int64) @ vec.astype(np.int64) % 2).astype(np.uint8)
