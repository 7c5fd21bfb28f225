import importlib
import json
import logging
import random
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
import typer
from rich.console import Console

from bridgecraft import config
from bridgecraft.bridges.base import BOTTOM, Bridge, BridgeKeyMaterial, check_bridge_correctness, identity_bridge
from bridgecraft.bridges.gentry import csgn_bridge_1, csgn_bridge_2, csgn_bridge_3, csgn_bridge_4, gm_table_bridge
from bridgecraft.bridges.gm_syy import GmSyyBridge, compare_eval, gm_syy_bridge
from bridgecraft.errors import (
    BridgeCraftError,
    CorrectnessError,
    CryptoError,
    KeyMismatchError,
    MalformedCiphertextError,
    ParameterError,
    SerializationError,
)
from bridgecraft.games import make_adversary, run_bridge_game, run_ind_cpa
from bridgecraft.schemes.base import EncryptionScheme
from bridgecraft.schemes.csgn import CsgnCiphertext, CsgnKey, CsgnScheme, csgn_dec, csgn_enc
from bridgecraft.schemes.gm import GmCiphertext, GmPublicKey, GmScheme, GmSecretKey, gm_dec, gm_enc
from bridgecraft.schemes.mockfhe import MockCiphertext, MockFheScheme, MockKey, mock_dec, mock_enc
from bridgecraft.schemes.syy import SyyCiphertext, SyyPublicKey, SyyScheme, syy_dec, syy_enc
from bridgecraft.utils import serialization
from bridgecraft.utils.bench import MONOMIAL_BRIDGES, bench_compare, bench_monomial, bench_trend, write_csv

logger = logging.getLogger("bridgecraft")

app = typer.Typer(name="bridgecraft", add_completion=False)
console = Console(stderr=True)

EXIT_USAGE = 1
EXIT_CRYPTO = 2
EXIT_CORRECTNESS = 3

BRIDGES = ("gm-syy", "identity-gm", "gm-table-mock", "csgn-1", "csgn-2", "csgn-3", "csgn-4")
SCHEMES = ("gm", "syy", "csgn", "mock") + BRIDGES
TOY_PRIMES = (7, 11)


@dataclass
class CliState:
    seed: int
    scheme: str
    out: Optional[Path]
    secure: bool
    insecure: bool

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def _configure_logging(verbose: bool) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(config.LOG_FILE))
    logging.basicConfig(
        level=logging.DEBUG if verbose else config.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def _state(ctx: typer.Context) -> CliState:
    return ctx.obj


@app.callback()
def callback(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for every random choice"),
    scheme: str = typer.Option("gm", "--scheme", help=f"Scheme: {', '.join(SCHEMES)}"),
    params: Optional[Path] = typer.Option(None, "--params", help="JSON file of configuration overrides"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (or prefix for keygen)"),
    secure: bool = typer.Option(False, "--secure/--no-secure", help="Refuse mock backends and small moduli"),
    insecure: bool = typer.Option(False, "--insecure", help="Allow writing and reading mock artifacts"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    bridgecraft: bridges between encryption schemes, with the schemes and security games around them.
    """
    if params is not None:
        config.load_config(params)
    _configure_logging(verbose)
    if scheme not in SCHEMES:
        raise ParameterError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    if secure and insecure:
        raise ParameterError("--secure and --insecure are mutually exclusive")
    ctx.obj = CliState(
        seed=config.DEFAULT_SEED if seed is None else seed,
        scheme=scheme,
        out=out,
        secure=secure,
        insecure=insecure,
    )


def _check_modulus(state: CliState, bits: int) -> None:
    if bits >= config.SECURE_MIN_BITS:
        return
    if state.secure:
        raise ParameterError(f"secure mode needs moduli of at least {config.SECURE_MIN_BITS} bits, got {bits}")
    logger.warning(f"{bits}-bit modulus is far below {config.SECURE_MIN_BITS} bits; use it for experiments only")


def _check_mock(state: CliState) -> None:
    if state.secure:
        raise ParameterError("secure mode refuses the mock homomorphic backend")


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text)
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")
        console.print(f"[green]Wrote {out}[/green]")


def _read(state: CliState, path: Path, kind: Optional[str] = None) -> Any:
    return serialization.read_file(path, kind=kind, allow_insecure=state.insecure)


@app.command()
def keygen(
    ctx: typer.Context,
    bits: Optional[int] = typer.Option(None, "--bits", "-b", help="GM modulus size"),
    ell: Optional[int] = typer.Option(None, "--ell", help="SYY vector length"),
    n: Optional[int] = typer.Option(None, "--n", help="CSGN length"),
    d: Optional[int] = typer.Option(None, "--d", help="CSGN maximum zeros per ciphertext"),
    s: Optional[int] = typer.Option(None, "--s", help="CSGN secret subset size"),
    p: int = typer.Option(2, "--p", help="Mock plaintext modulus"),
):
    """Generate keys for --scheme and write <out>.pk.json and <out>.sk.json.

    For a bridge name, writes all three key stages to <out>.keys.json instead.
    """
    state = _state(ctx)
    bits = bits or config.GM_BITS
    ell = ell or config.SYY_ELL
    prefix = str(state.out or "bridgecraft")
    rng = state.rng()
    allow = state.insecure

    if state.scheme in BRIDGES:
        if state.scheme in ("gm-syy", "identity-gm"):
            _check_modulus(state, bits)
        csgn = None
        if state.scheme.startswith("csgn-"):
            csgn = CsgnScheme(n or config.CSGN_N, d or config.CSGN_D, s or config.CSGN_S)
        chosen = make_bridge(state.scheme, bits, ell, csgn=csgn)
        if isinstance(chosen.target, MockFheScheme):
            _check_mock(state)
        material = chosen.keygen3(rng)
        path = serialization.write_file(
            f"{prefix}.keys.json", material, allow_insecure=allow, params={"bridge": state.scheme}
        )
        console.print(f"[green]Wrote bridge keys for {chosen.name} to {path}[/green]")
        return

    if state.scheme == "mock":
        _check_mock(state)
    if state.scheme in ("gm", "syy"):
        _check_modulus(state, bits)
    scheme = _make_scheme(state.scheme, bits, ell, n, d, s, p)
    keys = scheme.keygen(rng)
    pk_path = serialization.write_file(f"{prefix}.pk.json", keys.pk, allow_insecure=allow)
    sk_path = serialization.write_file(f"{prefix}.sk.json", keys.sk, secret=True, allow_insecure=allow)
    console.print(f"[green]Wrote {pk_path} and {sk_path}[/green]")


def _make_scheme(
    name: str,
    bits: int,
    ell: int,
    n: Optional[int] = None,
    d: Optional[int] = None,
    s: Optional[int] = None,
    p: int = 2,
) -> EncryptionScheme:
    if name == "gm":
        return GmScheme(bits)
    if name == "syy":
        return SyyScheme(bits, ell)
    if name == "csgn":
        return CsgnScheme(n or config.CSGN_N, d or config.CSGN_D, s or config.CSGN_S)
    if name == "mock":
        return MockFheScheme(p)
    raise ParameterError(f"scheme {name!r} is not a single encryption scheme")


@app.command()
def enc(
    ctx: typer.Context,
    key: Path = typer.Option(..., "--key", "-k", help="Public key file, secret key for CSGN, or a bridge-keys file"),
    message: int = typer.Option(..., "--message", "-m", help="Plaintext"),
):
    """Encrypt one plaintext."""
    state = _state(ctx)
    pk = _read(state, key)
    if isinstance(pk, BridgeKeyMaterial):
        pk = pk.pk1
    rng = state.rng()
    if isinstance(pk, GmPublicKey):
        c = gm_enc(pk, message, rng)
    elif isinstance(pk, SyyPublicKey):
        c = syy_enc(pk, message, rng)
    elif isinstance(pk, CsgnKey):
        c = csgn_enc(pk, message, rng)
    elif isinstance(pk, MockKey):
        _check_mock(state)
        c = mock_enc(pk, message, rng)
    else:
        raise SerializationError(f"{key} does not hold an encryption key")
    _emit(serialization.dumps(c, allow_insecure=state.insecure), state.out)


def _decrypt(sk: Any, c: Any) -> int:
    if isinstance(sk, GmSecretKey) and isinstance(c, GmCiphertext):
        return gm_dec(sk, c)
    if isinstance(sk, GmSecretKey) and isinstance(c, SyyCiphertext):
        return syy_dec(sk, c)
    if isinstance(sk, CsgnKey) and isinstance(c, CsgnCiphertext):
        return csgn_dec(sk, c)
    if isinstance(sk, MockKey) and isinstance(c, MockCiphertext):
        return mock_dec(sk, c)
    raise KeyMismatchError(f"cannot decrypt a {type(c).__name__} with a {type(sk).__name__}")


@app.command()
def dec(
    ctx: typer.Context,
    key: Path = typer.Option(..., "--key", "-k", help="Secret key file, or a bridge-keys file"),
    ciphertext: Path = typer.Option(..., "--in", "-i", help="Ciphertext file"),
):
    """Decrypt one ciphertext."""
    state = _state(ctx)
    sk, params = serialization.read_envelope(key, allow_insecure=state.insecure)
    c = _read(state, ciphertext)
    if not isinstance(sk, BridgeKeyMaterial):
        plaintext = _decrypt(sk, c)
    else:
        try:
            plaintext = _decrypt(sk.sk1, c)
        except KeyMismatchError:
            chosen = _bridge_for(sk, params, key)
            plaintext = chosen.embedding.inverse(chosen.dec_target(sk.sk2, c))
            if plaintext is BOTTOM:
                raise MalformedCiphertextError(f"{ciphertext} decrypts outside the image of {chosen.name}")
    _emit(json.dumps({"plaintext": plaintext}), state.out)


def _bridge_for(material: BridgeKeyMaterial, params: Dict[str, Any], source: Path) -> Bridge:
    """Rebuild the bridge a bridge-keys file was generated for, pinned to its source key."""
    name = params.get("bridge")
    if name is None:
        # files without a name can only come from the two empty-key bridges
        name = "gm-syy" if isinstance(material.pk2, SyyPublicKey) else "identity-gm"
    if name not in BRIDGES:
        raise SerializationError(f"{source} names unknown bridge {name!r}")
    sk1 = material.sk1
    if isinstance(sk1, GmSecretKey):
        bits = (sk1.p * sk1.q).bit_length()
        ell = material.pk2.ell if isinstance(material.pk2, SyyPublicKey) else config.SYY_ELL
        return make_bridge(name, bits, ell, primes=(sk1.p, sk1.q))
    if isinstance(sk1, CsgnKey):
        csgn = CsgnScheme(sk1.n, sk1.d, sk1.s, sk1.x_dist)
        return make_bridge(name, config.GM_BITS, config.SYY_ELL, csgn=csgn)
    raise SerializationError(f"{source} holds a {type(sk1).__name__} source key, which no bridge uses")


@app.command()
def bridge(
    ctx: typer.Context,
    keys: Path = typer.Option(..., "--keys", help="bridge-keys file"),
    ciphertext: Path = typer.Option(..., "--in", "-i", help="Source ciphertext file"),
):
    """Apply the bridge held in a bridge-keys file to one source ciphertext."""
    state = _state(ctx)
    material, params = serialization.read_envelope(keys, kind="bridge-keys", allow_insecure=state.insecure)
    chosen = _bridge_for(material, params, keys)
    c = _read(state, ciphertext)
    out = chosen.apply(material.public, c, state.rng())
    _emit(serialization.dumps(out, allow_insecure=state.insecure), state.out)


def parse_bits(text: str, n: int) -> List[int]:
    """Hex string to exactly ``n`` bits, most significant first."""
    try:
        value = int(text, 16)
    except ValueError:
        raise ParameterError(f"{text!r} is not a hex number")
    if n < 1:
        raise ParameterError(f"bit length must be positive, got {n}")
    if value < 0 or value >> n:
        raise ParameterError(f"{text!r} does not fit in {n} bits")
    return [(value >> (n - 1 - i)) & 1 for i in range(n)]


@app.command()
def compare(
    ctx: typer.Context,
    x: str = typer.Option(..., "--x", help="First vector as hex"),
    y: str = typer.Option(..., "--y", help="Second vector as hex"),
    n: int = typer.Option(..., "--n", help="Bit length of both vectors"),
    keys: Optional[Path] = typer.Option(None, "--keys", help="gm-syy bridge-keys file; generated from --seed if absent"),
    ell: Optional[int] = typer.Option(None, "--ell", help="SYY vector length for generated keys"),
    bits: Optional[int] = typer.Option(None, "--bits", "-b", help="GM modulus size for generated keys"),
    balanced: bool = typer.Option(False, "--balanced", help="Combine bits in a balanced tree"),
):
    """Encrypted equality test of two bit vectors: GM encryptions bridged into SYY and ANDed."""
    state = _state(ctx)
    xs, ys = parse_bits(x, n), parse_bits(y, n)
    rng = state.rng()
    if keys is not None:
        material = _read(state, keys, kind="bridge-keys")
        if not isinstance(material.pk2, SyyPublicKey):
            raise SerializationError(f"{keys} does not hold gm-syy bridge keys")
    else:
        bits = bits or config.GM_BITS
        material = gm_syy_bridge(bits, ell or config.SYY_ELL).keygen3(rng)
    _check_modulus(state, material.pk1.n.bit_length())

    pair = GmSyyBridge.from_material(material)
    cs = [gm_enc(pair.gm_pk, b, rng) for b in xs]
    ds = [gm_enc(pair.gm_pk, b, rng) for b in ys]
    result = compare_eval(pair, cs, ds, rng, balanced=balanced)
    verdict = syy_dec(pair.sk, result)
    console.print(f"[blue]Vectors are {'equal' if verdict else 'different'}[/blue]")
    payload = {"n": n, "ell": pair.ell, "verdict": verdict, "ciphertext": serialization.dump(result)}
    _emit(json.dumps(payload, indent=2, sort_keys=True), state.out)


def make_bridge(
    name: str,
    bits: int,
    ell: int,
    csgn: Optional[CsgnScheme] = None,
    primes: Optional[Tuple[int, int]] = None,
) -> Bridge:
    """Build a bridge by CLI name.

    ``csgn`` fixes the CSGN source parameters (configured defaults otherwise);
    ``primes`` pins GM sources to the primes of an existing key.
    """
    if name == "gm-syy":
        return gm_syy_bridge(bits, ell, fixed_primes=primes)
    if name == "identity-gm":
        return identity_bridge(GmScheme(bits, fixed_primes=primes))
    if name == "gm-table-mock":
        return gm_table_bridge(GmScheme(fixed_primes=primes or TOY_PRIMES))
    source = csgn if csgn is not None else CsgnScheme(config.CSGN_N, config.CSGN_D, config.CSGN_S)
    if name == "csgn-1":
        return csgn_bridge_1(source, MockFheScheme(2))
    if name == "csgn-2":
        return csgn_bridge_2(source, MockFheScheme(2))
    if name == "csgn-3":
        return csgn_bridge_3(source)
    if name == "csgn-4":
        return csgn_bridge_4(source, MockFheScheme(2))
    raise ParameterError(f"unknown bridge {name!r}; choose from {', '.join(BRIDGES)}")


@app.command()
def game(
    ctx: typer.Context,
    adversary: str = typer.Option(..., "--adversary", "-a", help="random, gm-factoring, transparent, second-component, first-component"),
    trials: Optional[int] = typer.Option(None, "--trials", "-t", help="Total runs over both experiments"),
    bridge_name: Optional[str] = typer.Option(None, "--bridge", help="Play against this bridge's graph scheme"),
    bits: Optional[int] = typer.Option(None, "--bits", "-b", help="GM modulus size"),
    ell: Optional[int] = typer.Option(None, "--ell", help="SYY vector length"),
    jobs: int = typer.Option(1, "--jobs", "-j", help="Worker threads"),
    fixed_key: bool = typer.Option(False, "--fixed-key", help="One key for all runs (non-standard, faster)"),
):
    """Run an IND-CPA experiment and print its report."""
    state = _state(ctx)
    trials = trials or config.GAME_TRIALS
    bits = bits or config.GM_BITS
    ell = ell or config.SYY_ELL
    adv = make_adversary(adversary)
    rng = state.rng()

    if bridge_name is not None:
        chosen = make_bridge(bridge_name, bits, ell)
        if isinstance(chosen.target, MockFheScheme):
            _check_mock(state)
        report = run_bridge_game(chosen, adv, trials, rng, fixed_key=fixed_key, jobs=jobs)
    else:
        if state.scheme == "mock":
            _check_mock(state)
        scheme = _make_scheme(state.scheme, bits, ell)
        report = run_ind_cpa(scheme, adv, trials, rng, fixed_key=fixed_key, jobs=jobs)

    console.print(f"[blue]Advantage {report.advantage:.4f} +/- {report.half_width:.4f}[/blue]")
    _emit(serialization.dumps(report), state.out)


@app.command()
def check(
    ctx: typer.Context,
    bridge_name: str = typer.Option(..., "--bridge", help=f"One of {', '.join(BRIDGES)}"),
    trials: int = typer.Option(1000, "--trials", "-t", help="Bridged encryptions to decrypt"),
    bits: Optional[int] = typer.Option(None, "--bits", "-b", help="GM modulus size"),
    ell: Optional[int] = typer.Option(None, "--ell", help="SYY vector length"),
    jobs: int = typer.Option(1, "--jobs", "-j", help="Worker threads"),
):
    """Measure a bridge's failure rate; exits 3 when it is above the declared bound."""
    state = _state(ctx)
    chosen = make_bridge(bridge_name, bits or config.GM_BITS, ell or config.SYY_ELL)
    if isinstance(chosen.target, MockFheScheme):
        _check_mock(state)
    report = check_bridge_correctness(chosen, trials, state.rng(), jobs=jobs)
    _emit(json.dumps(report.to_dict(), indent=2, sort_keys=True), state.out)
    if not report.passed:
        raise CorrectnessError(
            f"bridge {chosen.name} failed {report.failures}/{trials} times, above bound {chosen.failure_bound:.3g}"
        )


@app.command()
def bench(
    ctx: typer.Context,
    bridge_name: str = typer.Option("gm-syy", "--bridge", help=f"gm-syy or one of {', '.join(MONOMIAL_BRIDGES)}"),
    sizes: Optional[str] = typer.Option(None, "--n", help="Comma-separated sizes (vector length for gm-syy, degree otherwise)"),
    reps: Optional[int] = typer.Option(None, "--reps", "-r", help="Timed repetitions per size"),
    bits: Optional[int] = typer.Option(None, "--bits", "-b", help="GM modulus size"),
    ell: Optional[int] = typer.Option(None, "--ell", help="SYY vector length"),
):
    """Time the comparison circuit or the monomial experiment and print CSV."""
    state = _state(ctx)
    if sizes:
        try:
            values = [int(v) for v in sizes.split(",") if v.strip()]
        except ValueError:
            raise ParameterError(f"--n expects comma-separated integers, got {sizes!r}")
    else:
        values = list(config.BENCH_SIZES)
    if not values or any(v < 1 for v in values):
        raise ParameterError("--n needs positive sizes")

    if bridge_name == "gm-syy":
        rows = bench_compare(values, reps=reps, bits=bits, ell=ell, seed=state.seed)
    else:
        rows = bench_monomial(bridge_name, values, reps=reps, seed=state.seed)
    _emit(write_csv(rows).rstrip("\n"), state.out)


@app.command()
def trend(
    ctx: typer.Context,
    csv_path: Path = typer.Option(..., "--csv", help="CSV written by bench"),
):
    """Fit median time against size and report slope and R^2."""
    state = _state(ctx)
    if not csv_path.exists():
        raise ParameterError(f"CSV file not found: {csv_path}")
    report = bench_trend(csv_path)
    _emit(json.dumps(report.to_dict()), state.out)


def _exit_code(error: BaseException) -> int:
    if isinstance(error, CorrectnessError):
        return EXIT_CORRECTNESS
    if isinstance(error, CryptoError):
        return EXIT_CRYPTO
    return EXIT_USAGE


def _report_error(error: BaseException, code: int) -> int:
    payload = {"error": type(error).__name__, "message": str(error), "exit_code": code}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def _usage_error_types() -> Tuple[type, ...]:
    """Click's usage errors, from every click module typer may raise them from."""
    types: List[type] = [click.ClickException, click.exceptions.Abort]
    try:
        bundled = importlib.import_module("typer._click.exceptions")
    except ImportError:
        return tuple(types)
    types.extend([bundled.ClickException, bundled.Abort])
    return tuple(types)


USAGE_ERRORS = _usage_error_types()


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI on ``argv`` and return its exit code."""
    try:
        result = app(args=argv, prog_name="bridgecraft", standalone_mode=False)
    except USAGE_ERRORS as e:
        return _report_error(e, EXIT_USAGE)
    except BridgeCraftError as e:
        code = _exit_code(e)
        logger.debug(f"Exiting with code {code}: {e}")
        return _report_error(e, code)
    return result if isinstance(result, int) else 0


def run():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    run()
