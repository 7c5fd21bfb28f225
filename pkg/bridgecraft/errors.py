"""Exception hierarchy for bridgecraft.

The CLI maps these onto exit codes: parameter and serialization problems exit 1,
cryptographic failures exit 2, failed correctness checks exit 3.
"""


class BridgeCraftError(Exception):
    """Base class for every error raised by bridgecraft."""


class ParameterError(BridgeCraftError, ValueError):
    """A parameter is out of range or inconsistent with another one."""


class SerializationError(BridgeCraftError):
    """A key, ciphertext or report file could not be read or written."""


class MorphismError(BridgeCraftError):
    """A map between finite distributions is not well formed."""


class AdversaryError(BridgeCraftError):
    """An adversary broke the rules of a security game."""


class CorrectnessError(BridgeCraftError):
    """A correctness check exceeded its declared failure bound."""


class CryptoError(BridgeCraftError):
    """Base class for failures inside a cryptographic operation."""


class MalformedCiphertextError(CryptoError):
    """A ciphertext is not an element of the scheme's ciphertext space."""


class KeyMismatchError(CryptoError):
    """Operands belong to different keys, moduli, rings or dimensions."""


class DepthExceededError(CryptoError):
    """A homomorphic ciphertext went past the multiplicative depth its key supports."""

    def __init__(self, depth: int, capacity: int):
        super().__init__(f"multiplicative depth {depth} exceeds capacity {capacity}")
        self.depth = depth
        self.capacity = capacity


class SamplingError(CryptoError):
    """A bounded rejection-sampling loop ran out of attempts."""

    def __init__(self, what: str, attempts: int):
        super().__init__(f"could not sample {what} after {attempts} attempts")
        self.what = what
        self.attempts = attempts
