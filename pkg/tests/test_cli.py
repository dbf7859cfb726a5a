from __future__ import annotations

import json

import pytest

from tau2loop.cli import CHECK_IDS, main, resolve_checks, UsageError


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_drinfeld(capsys):
    code, out, _ = run_cli(capsys, "drinfeld", "--N", "3", "--L", "6")
    assert code == 0
    assert "1 50 141 50 1" in out


def test_unknown_check_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--N", "3", "--L", "3", "--check", "bogus")
    assert code == 2 and "serre.q0.exhaustive" in err
    with pytest.raises(UsageError):
        resolve_checks(["bogus"])


def test_bad_config_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "verify", "--N", "1", "--L", "3", "--check", "lambda.tables")
    assert code == 2 and "N must be >= 2" in err


def test_missing_argument_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--N", "3"])
    assert exc.value.code == 2


def test_skip_is_not_failure(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "verify", "--N", "3", "--L", "4", "--check", "serre.q0.exhaustive", "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["summary"] == {"pass": 0, "fail": 0, "skip": 1}
    assert rep["checks"][0]["witness"]["reason"] == "L not multiple of N"


def test_failure_exit_code(capsys):
    code, _, _ = run_cli(capsys, "verify", "--N", "3", "--L", "3", "--check", "comm.full")
    assert code == 1


def test_report_roundtrip_and_determinism(tmp_path, capsys):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    for p in paths:
        code, _, _ = run_cli(
            capsys, "verify", "--N", "2", "--L", "2", "--check", "all", "--out", str(p), "--seed", "7"
        )
        assert code == 0
    docs = [json.loads(p.read_text()) for p in paths]
    strip = lambda d: [{k: v for k, v in c.items() if k != "elapsed_ms"} for c in d["checks"]]
    assert strip(docs[0]) == strip(docs[1])
    assert docs[0]["config"] == docs[1]["config"]
    assert docs[0]["schema"] == 1 and docs[0]["summary"]["fail"] == 0
    code, out, _ = run_cli(capsys, "report", str(paths[0]))
    assert code == 0 and "serre.q0.exhaustive" in out


def test_spectrum_csv(tmp_path, capsys):
    p = tmp_path / "s.csv"
    code, _, _ = run_cli(capsys, "spectrum", "--N", "3", "--L", "3", "--t", "0.3+0.2i", "--out", str(p))
    assert code == 0
    assert p.read_text().startswith("t_re,t_im,Q,eigenvalue_re,eigenvalue_im,multiplicity")


def test_checks_listing(capsys):
    code, out, _ = run_cli(capsys, "checks")
    assert code == 0
    assert all(cid in out for cid in CHECK_IDS)


def test_decompose_and_gen(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "decompose", "--N", "2", "--L", "2")
    assert code == 0
    code, _, _ = run_cli(capsys, "gen", "--N", "2", "--L", "2", "--cache-dir", str(tmp_path))
    assert code == 0 and list(tmp_path.glob("*.json"))
