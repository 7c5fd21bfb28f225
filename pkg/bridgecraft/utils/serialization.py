"""JSON envelopes for keys, ciphertexts, bridge keys and game reports.

Every file looks like ``{"kind", "version", "params", "payload"}``. Integers are
lowercase big-endian hex without a prefix; bit vectors are hex of
``numpy.packbits`` together with their length.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from bridgecraft.bridges.base import BridgeKeyMaterial
from bridgecraft.bridges.gentry import GentryBridgeKey, GentrySecretKey
from bridgecraft.errors import SerializationError
from bridgecraft.schemes.csgn import CsgnCiphertext, CsgnKey
from bridgecraft.schemes.gm import GmCiphertext, GmPublicKey, GmSecretKey
from bridgecraft.schemes.mockfhe import MockCiphertext, MockKey
from bridgecraft.schemes.syy import SyyCiphertext, SyyPublicKey
from bridgecraft.utils.findist import FiniteDistribution, GameReport

logger = logging.getLogger("bridgecraft.utils.serialization")

VERSION = 1

KINDS = (
    "gm-public-key",
    "gm-secret-key",
    "gm-ciphertext",
    "syy-public-key",
    "syy-ciphertext",
    "csgn-key",
    "csgn-ciphertext",
    "mock-public-key",
    "mock-secret-key",
    "mock-ciphertext",
    "bridge-keys",
    "game-report",
)

INSECURE_KINDS = frozenset({"mock-public-key", "mock-secret-key", "mock-ciphertext"})


def to_hex(value: int) -> str:
    if value < 0:
        raise SerializationError(f"cannot serialize negative integer {value}")
    return format(value, "x")


def from_hex(text: Any) -> int:
    if not isinstance(text, str) or not text or text.startswith(("0x", "-", "+")):
        raise SerializationError(f"expected a bare hex string, got {text!r}")
    try:
        return int(text, 16)
    except ValueError:
        raise SerializationError(f"invalid hex integer {text!r}")


def pack_bits(bits: np.ndarray) -> Dict[str, Any]:
    bits = np.asarray(bits, dtype=np.uint8)
    return {"length": int(bits.shape[0]), "hex": np.packbits(bits).tobytes().hex()}


def unpack_bits(data: Dict[str, Any]) -> np.ndarray:
    try:
        length = int(data["length"])
        raw = np.frombuffer(bytes.fromhex(data["hex"]), dtype=np.uint8)
    except (KeyError, TypeError, ValueError) as e:
        raise SerializationError(f"malformed bit vector: {e}")
    bits = np.unpackbits(raw)
    if bits.shape[0] < length or bits[length:].any():
        raise SerializationError(f"bit vector payload does not match length {length}")
    return bits[:length].astype(np.uint8)


def _dist_to_dict(dist: FiniteDistribution) -> Dict[str, Any]:
    return {"support": list(dist.support), "probs": [str(p) for p in dist.probs]}


def _dist_from_dict(data: Dict[str, Any]) -> FiniteDistribution:
    return FiniteDistribution(tuple(data["support"]), tuple(Fraction(p) for p in data["probs"]))


def envelope(kind: str, params: Dict[str, Any], payload: Dict[str, Any]) -> Dict[str, Any]:
    if kind not in KINDS:
        raise SerializationError(f"unknown kind {kind!r}")
    data = {"kind": kind, "version": VERSION, "params": params, "payload": payload}
    if kind in INSECURE_KINDS:
        data["insecure"] = True
    return data


def _kind_of(obj: Any, secret: bool) -> str:
    if isinstance(obj, GmPublicKey):
        return "gm-public-key"
    if isinstance(obj, GmSecretKey):
        return "gm-secret-key"
    if isinstance(obj, GmCiphertext):
        return "gm-ciphertext"
    if isinstance(obj, SyyPublicKey):
        return "syy-public-key"
    if isinstance(obj, SyyCiphertext):
        return "syy-ciphertext"
    if isinstance(obj, CsgnKey):
        return "csgn-key"
    if isinstance(obj, CsgnCiphertext):
        return "csgn-ciphertext"
    if isinstance(obj, MockKey):
        return "mock-secret-key" if secret else "mock-public-key"
    if isinstance(obj, MockCiphertext):
        return "mock-ciphertext"
    if isinstance(obj, BridgeKeyMaterial):
        return "bridge-keys"
    if isinstance(obj, GameReport):
        return "game-report"
    raise SerializationError(f"cannot serialize objects of type {type(obj).__name__}")


def dump(obj: Any, secret: bool = False, allow_insecure: bool = False, params: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Envelope for ``obj``; ``secret`` picks the secret-key kind for records shared by both keys."""
    kind = _kind_of(obj, secret)
    if kind in INSECURE_KINDS and not allow_insecure:
        raise SerializationError(f"refusing to serialize insecure {kind} without allow_insecure")
    params = dict(params or {})

    if kind == "gm-public-key":
        params.setdefault("bits", obj.n.bit_length())
        payload = {"n": to_hex(obj.n), "gamma": to_hex(obj.gamma)}
    elif kind == "gm-secret-key":
        params.setdefault("bits", obj.n.bit_length())
        payload = {"p": to_hex(obj.p), "q": to_hex(obj.q)}
    elif kind == "gm-ciphertext":
        payload = {"c": to_hex(obj.value)}
    elif kind == "syy-public-key":
        params.setdefault("bits", obj.n.bit_length())
        params.setdefault("ell", obj.ell)
        payload = {"n": to_hex(obj.n), "gamma": to_hex(obj.gamma), "ell": obj.ell}
    elif kind == "syy-ciphertext":
        params.setdefault("ell", obj.ell)
        payload = {"components": [to_hex(t) for t in obj.components]}
    elif kind == "csgn-key":
        params.update({"n": obj.n, "d": obj.d, "s": obj.s})
        payload = {"subset": pack_bits(obj.subset), "x_dist": _dist_to_dict(obj.x_dist)}
    elif kind == "csgn-ciphertext":
        params.setdefault("n", obj.n)
        payload = {"bits": pack_bits(obj.bits)}
    elif kind in ("mock-public-key", "mock-secret-key"):
        params.setdefault("p", obj.modulus)
        payload = {"modulus": obj.modulus, "capacity": obj.capacity, "key_id": to_hex(obj.key_id)}
    elif kind == "mock-ciphertext":
        params.setdefault("p", obj.modulus)
        payload = {
            "plaintext": obj.plaintext,
            "depth": obj.depth,
            "tag": to_hex(obj.tag),
            "modulus": obj.modulus,
            "key_id": to_hex(obj.key_id),
        }
    elif kind == "bridge-keys":
        payload = {
            "scheme1": {
                "sk": encode_value(obj.sk1, secret=True, allow_insecure=allow_insecure),
                "pk": encode_value(obj.pk1, allow_insecure=allow_insecure),
            },
            "scheme2": {
                "sk": encode_value(obj.sk2, secret=True, allow_insecure=allow_insecure),
                "pk": encode_value(obj.pk2, allow_insecure=allow_insecure),
            },
            "bk": encode_value(obj.bk, allow_insecure=allow_insecure),
        }
    else:
        payload = obj.to_dict()

    return envelope(kind, params, payload)


def load(data: Any, kind: Optional[str] = None, allow_insecure: bool = False) -> Any:
    """Inverse of ``dump``; ``kind`` additionally pins the expected kind."""
    if not isinstance(data, dict):
        raise SerializationError("envelope must be a JSON object")
    found = data.get("kind")
    if found not in KINDS:
        raise SerializationError(f"unknown kind {found!r}")
    if kind is not None and found != kind:
        raise SerializationError(f"expected a {kind} file, got {found}")
    if data.get("version") != VERSION:
        raise SerializationError(f"unsupported version {data.get('version')!r}")
    if found in INSECURE_KINDS and not allow_insecure:
        raise SerializationError(f"refusing to load insecure {found} without allow_insecure")

    params = data.get("params") or {}
    payload = data.get("payload")
    if not isinstance(payload, dict):
        raise SerializationError("envelope payload must be an object")

    try:
        if found == "gm-public-key":
            return GmPublicKey(from_hex(payload["n"]), from_hex(payload["gamma"]))
        if found == "gm-secret-key":
            return GmSecretKey(from_hex(payload["p"]), from_hex(payload["q"]))
        if found == "gm-ciphertext":
            return GmCiphertext(from_hex(payload["c"]))
        if found == "syy-public-key":
            return SyyPublicKey(from_hex(payload["n"]), from_hex(payload["gamma"]), int(payload["ell"]))
        if found == "syy-ciphertext":
            return SyyCiphertext(tuple(from_hex(t) for t in payload["components"]))
        if found == "csgn-key":
            return CsgnKey(
                int(params["n"]),
                int(params["d"]),
                int(params["s"]),
                unpack_bits(payload["subset"]),
                _dist_from_dict(payload["x_dist"]),
            )
        if found == "csgn-ciphertext":
            return CsgnCiphertext(unpack_bits(payload["bits"]))
        if found in ("mock-public-key", "mock-secret-key"):
            return MockKey(int(payload["modulus"]), payload["capacity"], from_hex(payload["key_id"]))
        if found == "mock-ciphertext":
            return MockCiphertext(
                int(payload["plaintext"]),
                int(payload["depth"]),
                from_hex(payload["tag"]),
                int(payload["modulus"]),
                from_hex(payload["key_id"]),
            )
        if found == "bridge-keys":
            first, second = payload["scheme1"], payload["scheme2"]
            return BridgeKeyMaterial(
                decode_value(first["sk"], allow_insecure),
                decode_value(first["pk"], allow_insecure),
                decode_value(second["sk"], allow_insecure),
                decode_value(second["pk"], allow_insecure),
                decode_value(payload["bk"], allow_insecure),
            )
        return GameReport.from_dict(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise SerializationError(f"malformed {found} payload: {e!r}")


def encode_value(value: Any, secret: bool = False, allow_insecure: bool = False) -> Any:
    """Encode one bridge-key component as an envelope, a tagged record or null.

    Gentry bridge keys hold target ciphertexts (one tuple per key bit for the
    fourth CSGN bridge); each is written with the target's own envelope.
    """
    if value is None:
        return None
    if isinstance(value, bool):
        raise SerializationError("booleans have no bridge-key encoding")
    if isinstance(value, int):
        return {"int": value}
    if isinstance(value, (tuple, list)):
        return {"tuple": [encode_value(v, secret, allow_insecure) for v in value]}
    if isinstance(value, GentrySecretKey):
        return {
            "gentry-secret-key": {
                "source": encode_value(value.source, True, allow_insecure),
                "target": encode_value(value.target, True, allow_insecure),
            }
        }
    if isinstance(value, GentryBridgeKey):
        return {
            "gentry-bridge-key": {
                "entries": encode_value(value.entries, False, allow_insecure),
                "evk": encode_value(value.evk, False, allow_insecure),
                "one": encode_value(value.one, False, allow_insecure),
            }
        }
    return dump(value, secret=secret, allow_insecure=allow_insecure)


def decode_value(data: Any, allow_insecure: bool = False) -> Any:
    if data is None:
        return None
    if not isinstance(data, dict):
        raise SerializationError(f"malformed bridge-key component {data!r}")
    if "kind" in data:
        return load(data, allow_insecure=allow_insecure)
    if len(data) != 1:
        raise SerializationError(f"bridge-key component needs exactly one tag, got {sorted(data)}")
    tag, body = next(iter(data.items()))
    if tag == "int":
        if isinstance(body, bool) or not isinstance(body, int):
            raise SerializationError(f"expected an integer, got {body!r}")
        return body
    if tag == "tuple":
        if not isinstance(body, list):
            raise SerializationError("tuple component must hold a list")
        return tuple(decode_value(v, allow_insecure) for v in body)
    if tag == "gentry-secret-key":
        return GentrySecretKey(decode_value(body["source"], allow_insecure), decode_value(body["target"], allow_insecure))
    if tag == "gentry-bridge-key":
        return GentryBridgeKey(
            decode_value(body["entries"], allow_insecure),
            decode_value(body["evk"], allow_insecure),
            decode_value(body["one"], allow_insecure),
        )
    raise SerializationError(f"unknown bridge-key component tag {tag!r}")


def dumps(obj: Any, **kwargs) -> str:
    return json.dumps(dump(obj, **kwargs), indent=2, sort_keys=True)


def loads(text: str, **kwargs) -> Any:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"not valid JSON: {e}")
    return load(data, **kwargs)


def write_file(path: Union[str, Path], obj: Any, **kwargs) -> Path:
    path = Path(path)
    path.write_text(dumps(obj, **kwargs) + "\n")
    logger.debug(f"Wrote {path}")
    return path


def read_file(path: Union[str, Path], **kwargs) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SerializationError(f"cannot read {path}: {e}")
    return loads(text, **kwargs)


def read_envelope(path: Union[str, Path], kind: Optional[str] = None, allow_insecure: bool = False) -> Tuple[Any, Dict[str, Any]]:
    """Like ``read_file`` but also returns the envelope params."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise SerializationError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise SerializationError(f"not valid JSON: {e}")
    obj = load(data, kind=kind, allow_insecure=allow_insecure)
    return obj, dict(data.get("params") or {})
