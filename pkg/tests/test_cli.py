import dataclasses
import json

import pytest

from bridgecraft import config, main
from bridgecraft.bridges.base import identity_bridge
from bridgecraft.main import EXIT_CORRECTNESS, EXIT_CRYPTO, EXIT_USAGE, cli_main, parse_bits
from bridgecraft.schemes.gm import GmCiphertext, GmScheme


def _error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_keygen_is_deterministic(tmp_path):
    for prefix in ("a", "b"):
        assert cli_main(["--seed", "7", "--out", str(tmp_path / prefix), "keygen", "--bits", "64"]) == 0
    for suffix in ("pk.json", "sk.json"):
        assert (tmp_path / f"a.{suffix}").read_text() == (tmp_path / f"b.{suffix}").read_text()


def test_enc_then_dec(tmp_path, capsys):
    prefix = tmp_path / "gm"
    assert cli_main(["--seed", "1", "--out", str(prefix), "keygen", "--bits", "64"]) == 0
    ct = tmp_path / "ct.json"
    assert cli_main(["--out", str(ct), "enc", "--key", f"{prefix}.pk.json", "--message", "1"]) == 0
    capsys.readouterr()
    assert cli_main(["dec", "--key", f"{prefix}.sk.json", "--in", str(ct)]) == 0
    assert _stdout_json(capsys) == {"plaintext": 1}


def test_csgn_keys_round_trip(tmp_path, capsys):
    prefix = tmp_path / "csgn"
    args = ["--seed", "2", "--scheme", "csgn", "--out", str(prefix), "keygen", "--n", "64", "--d", "8", "--s", "8"]
    assert cli_main(args) == 0
    ct = tmp_path / "ct.json"
    assert cli_main(["--out", str(ct), "enc", "--key", f"{prefix}.sk.json", "--message", "0"]) == 0
    capsys.readouterr()
    assert cli_main(["dec", "--key", f"{prefix}.sk.json", "--in", str(ct)]) == 0
    assert _stdout_json(capsys) == {"plaintext": 0}


def test_bridge_then_dec(tmp_path, capsys):
    prefix = tmp_path / "pair"
    assert cli_main(["--seed", "3", "--scheme", "gm-syy", "--out", str(prefix), "keygen", "--bits", "64", "--ell", "8"]) == 0
    keys = f"{prefix}.keys.json"
    gm_ct, syy_ct = tmp_path / "gm.json", tmp_path / "syy.json"
    for bit in (0, 1):
        assert cli_main(["--out", str(gm_ct), "enc", "--key", keys, "--message", str(bit)]) == 0
        assert cli_main(["--out", str(syy_ct), "bridge", "--keys", keys, "--in", str(gm_ct)]) == 0
        assert json.loads(syy_ct.read_text())["kind"] == "syy-ciphertext"
        capsys.readouterr()
        assert cli_main(["dec", "--key", keys, "--in", str(syy_ct)]) == 0
        assert _stdout_json(capsys) == {"plaintext": bit}


@pytest.mark.parametrize("name", ["csgn-2", "csgn-4"])
def test_csgn_bridge_then_dec(tmp_path, capsys, name):
    prefix = tmp_path / "pair"
    args = ["--insecure", "--seed", "10", "--scheme", name, "--out", str(prefix), "keygen", "--n", "16", "--d", "4", "--s", "4"]
    assert cli_main(args) == 0
    keys = f"{prefix}.keys.json"
    data = json.loads((tmp_path / "pair.keys.json").read_text())
    assert data["params"]["bridge"] == name
    assert data["payload"]["bk"] is not None
    csgn_ct, mock_ct = tmp_path / "csgn.json", tmp_path / "mock.json"
    for bit in (0, 1):
        assert cli_main(["--insecure", "--out", str(csgn_ct), "enc", "--key", keys, "--message", str(bit)]) == 0
        assert cli_main(["--insecure", "--out", str(mock_ct), "bridge", "--keys", keys, "--in", str(csgn_ct)]) == 0
        assert json.loads(mock_ct.read_text())["kind"] == "mock-ciphertext"
        capsys.readouterr()
        assert cli_main(["--insecure", "dec", "--key", keys, "--in", str(mock_ct)]) == 0
        assert _stdout_json(capsys) == {"plaintext": bit}


def test_gentry_bridge_keys_need_insecure(tmp_path, capsys):
    prefix = str(tmp_path / "table")
    assert cli_main(["--scheme", "gm-table-mock", "--out", prefix, "keygen"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "SerializationError"
    assert cli_main(["--secure", "--scheme", "csgn-2", "--out", prefix, "keygen", "--n", "16", "--d", "4", "--s", "4"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "ParameterError"


def test_table_bridge_then_dec(tmp_path, capsys):
    prefix = tmp_path / "table"
    assert cli_main(["--insecure", "--seed", "12", "--scheme", "gm-table-mock", "--out", str(prefix), "keygen"]) == 0
    keys = f"{prefix}.keys.json"
    gm_ct, mock_ct = tmp_path / "gm.json", tmp_path / "mock.json"
    assert cli_main(["--insecure", "--out", str(gm_ct), "enc", "--key", keys, "--message", "1"]) == 0
    assert cli_main(["--insecure", "--out", str(mock_ct), "bridge", "--keys", keys, "--in", str(gm_ct)]) == 0
    capsys.readouterr()
    assert cli_main(["--insecure", "dec", "--key", keys, "--in", str(mock_ct)]) == 0
    assert _stdout_json(capsys) == {"plaintext": 1}


@pytest.mark.parametrize("y,verdict", [("a5", 1), ("a4", 0)])
def test_compare(capsys, y, verdict):
    args = ["--seed", "4", "compare", "--x", "a5", "--y", y, "--n", "8", "--bits", "64", "--ell", "16"]
    assert cli_main(args) == 0
    result = _stdout_json(capsys)
    assert result["verdict"] == verdict
    assert result["n"] == 8 and result["ell"] == 16
    assert result["ciphertext"]["kind"] == "syy-ciphertext"


def test_compare_with_key_file(tmp_path, capsys):
    prefix = tmp_path / "pair"
    assert cli_main(["--seed", "5", "--scheme", "gm-syy", "--out", str(prefix), "keygen", "--bits", "64", "--ell", "12"]) == 0
    capsys.readouterr()
    assert cli_main(["compare", "--x", "3", "--y", "3", "--n", "2", "--keys", f"{prefix}.keys.json"]) == 0
    assert _stdout_json(capsys)["verdict"] == 1


def test_parse_bits():
    assert parse_bits("a5", 8) == [1, 0, 1, 0, 0, 1, 0, 1]
    assert parse_bits("1", 3) == [0, 0, 1]
    with pytest.raises(Exception):
        parse_bits("1ff", 8)


def test_usage_errors_exit_1(capsys):
    assert cli_main(["--scheme", "rsa", "keygen"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "ParameterError"
    assert cli_main(["compare", "--x", "zz", "--y", "1", "--n", "4"]) == EXIT_USAGE
    assert _error(capsys)["exit_code"] == EXIT_USAGE
    assert cli_main(["enc"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "MissingParameter"
    assert cli_main(["keygen", "--no-such-option"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "NoSuchOption"


def test_crypto_errors_exit_2(tmp_path, capsys):
    prefix = tmp_path / "csgn"
    assert cli_main(["--seed", "6", "--scheme", "csgn", "--out", str(prefix), "keygen", "--n", "64", "--d", "8", "--s", "8"]) == 0
    ct = tmp_path / "ct.json"
    ct.write_text(json.dumps({"kind": "gm-ciphertext", "version": 1, "params": {}, "payload": {"c": "5"}}))
    assert cli_main(["dec", "--key", f"{prefix}.sk.json", "--in", str(ct)]) == EXIT_CRYPTO
    assert _error(capsys)["error"] == "KeyMismatchError"


def test_failed_correctness_check_exits_3(monkeypatch, capsys):
    def flip(public, c, rng):
        return GmCiphertext(c.value * public.pk2.gamma % public.pk2.n)

    broken = dataclasses.replace(identity_bridge(GmScheme(fixed_primes=(7, 11))), map_f=flip)
    monkeypatch.setattr(main, "make_bridge", lambda name, bits, ell: broken)
    assert cli_main(["check", "--bridge", "identity-gm", "--trials", "20"]) == EXIT_CORRECTNESS
    assert _error(capsys)["error"] == "CorrectnessError"


def test_check_passes(capsys):
    assert cli_main(["--seed", "1", "check", "--bridge", "gm-table-mock", "--trials", "50"]) == 0
    report = _stdout_json(capsys)
    assert report["failures"] == 0 and report["passed"]


def test_mock_needs_insecure(tmp_path, capsys):
    prefix = str(tmp_path / "mock")
    assert cli_main(["--scheme", "mock", "--out", prefix, "keygen"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "SerializationError"
    assert cli_main(["--insecure", "--scheme", "mock", "--out", prefix, "keygen", "--p", "5"]) == 0
    assert json.loads(open(f"{prefix}.pk.json").read())["insecure"] is True


def test_secure_mode(tmp_path, capsys):
    prefix = str(tmp_path / "k")
    assert cli_main(["--secure", "--out", prefix, "keygen", "--bits", "64"]) == EXIT_USAGE
    assert cli_main(["--secure", "--scheme", "mock", "--out", prefix, "keygen"]) == EXIT_USAGE
    assert cli_main(["--secure", "--insecure", "keygen"]) == EXIT_USAGE


def test_params_file(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "GM_BITS", config.GM_BITS)
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"gm_bits": 48}))
    prefix = tmp_path / "small"
    assert cli_main(["--params", str(params), "--out", str(prefix), "keygen"]) == 0
    pk = json.loads((tmp_path / "small.pk.json").read_text())
    assert pk["params"]["bits"] in (47, 48)


def test_game(capsys):
    args = ["--seed", "8", "game", "--adversary", "gm-factoring", "--trials", "100", "--bits", "32"]
    assert cli_main(args) == 0
    report = _stdout_json(capsys)
    assert report["kind"] == "game-report"
    assert report["payload"]["advantage"] >= 0.9
    assert report["payload"]["adversary"] == "gm-factoring"


def test_bridge_game(capsys):
    args = ["--seed", "9", "game", "--adversary", "second-component", "--trials", "100", "--bridge", "gm-table-mock"]
    assert cli_main(args) == 0
    assert _stdout_json(capsys)["payload"]["advantage"] == 1.0


def test_unknown_adversary(capsys):
    assert cli_main(["game", "--adversary", "oracle", "--trials", "100"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "AdversaryError"


def test_bench_then_trend(tmp_path, capsys):
    csv_path = tmp_path / "bench.csv"
    assert cli_main(["--out", str(csv_path), "bench", "--bridge", "csgn-2", "--n", "2,3,4", "--reps", "10"]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "bridge,param_n,ell,bits,reps,median_ms,p10_ms,p90_ms"
    assert len(lines) == 4
    capsys.readouterr()
    assert cli_main(["trend", "--csv", str(csv_path)]) == 0
    report = _stdout_json(capsys)
    assert report["bridge"] == "csgn-2"
    assert report["points"] == 3


def test_trend_needs_data(tmp_path, capsys):
    assert cli_main(["trend", "--csv", str(tmp_path / "missing.csv")]) == EXIT_USAGE
    assert _error(capsys)["error"] == "ParameterError"


def test_bench_needs_ten_repetitions(capsys):
    assert cli_main(["bench", "--bridge", "csgn-2", "--n", "2,3,4", "--reps", "2"]) == EXIT_USAGE
    assert _error(capsys)["error"] == "ParameterError"
