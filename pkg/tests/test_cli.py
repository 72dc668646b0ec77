"""Command-line interface: subcommands, exit codes, deterministic reports."""

from __future__ import annotations

import json
import os

import pytest

from algebroidkit.cli import main
from algebroidkit.fixtures import fixture_corpus
from algebroidkit.modelio import serialize_model


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("models")
    for name, obj in fixture_corpus().items():
        (d / f"{name}.json").write_text(serialize_model(obj))
    return d


def run(args):
    return main([str(a) for a in args])


def test_validate_all_fixtures(model_dir, capsys):
    for path in sorted(model_dir.iterdir()):
        assert run(["validate", path]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out


def test_frakd_square_exit_codes(model_dir, capsys):
    assert run(["frakd-square", model_dir / "trivial.geometric.json"]) == 0
    assert run(["frakd-square", model_dir / "rank1_curved.geometric.json"]) == 0
    capsys.readouterr()
    assert run(["frakd-square", model_dir / "generic.geometric.json"]) == 1
    out = capsys.readouterr().out
    assert "lowest violating weight shift" in out


def test_duality_exit_zero_on_all_geometric(model_dir):
    for path in sorted(model_dir.glob("*.geometric.json")):
        assert run(["duality", path]) == 0


def test_jacobi_perturbed_fails_with_localized_residual(model_dir, capsys):
    assert run(["jacobi", model_dir / "perturbed.algebroid.json"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] jacobi[n=3]" in out
    assert "coeff=" in out


def test_jacobi_single_arity_flag(model_dir, capsys):
    assert run(["jacobi", model_dir / "perturbed.algebroid.json", "--arity", "2"]) == 0
    out = capsys.readouterr().out
    assert "jacobi[n=2]" in out and "n=3" not in out


def test_roundtrip_and_lemmas_and_anchor(model_dir):
    assert run(["roundtrip", model_dir / "conjugated.algebroid.json"]) == 0
    assert run(["roundtrip", model_dir / "rank2.geometric.json"]) == 0
    assert run(["lemmas", model_dir / "rank2.geometric.json"]) == 0
    assert run(["anchor", model_dir / "conjugated.algebroid.json"]) == 0
    assert run(["leibniz", model_dir / "conjugated.algebroid.json"]) == 0


def test_ce_build_and_extract_and_kapranov(model_dir, capsys):
    assert run(["ce-build", model_dir / "conjugated.algebroid.json"]) == 0
    assert run(["ce-extract", model_dir / "rank2.geometric.json"]) == 0
    assert run(["frakd-build", model_dir / "rank2.geometric.json"]) == 0
    assert run(["kapranov", model_dir / "diagonal.geometric.json"]) == 0
    capsys.readouterr()


def test_mc_command(model_dir):
    assert run(["mc", model_dir / "conjugated.algebroid.json", "--seed", "3"]) == 0
    assert run(["mc", model_dir / "rank2.geometric.json"]) == 0


def test_missing_file_exits_2(capsys):
    assert run(["validate", "no-such-file.json"]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_malformed_file_exits_2(model_dir, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "algebroidkit/1"')
    assert run(["validate", bad]) == 2
    assert "error" in capsys.readouterr().err


def test_wrong_kind_exits_2(model_dir, capsys):
    assert run(["frakd-square", model_dir / "conjugated.algebroid.json"]) == 2
    assert "geometric" in capsys.readouterr().err


def test_json_report_is_canonical_and_timing_free(model_dir, tmp_path):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert run(["jacobi", model_dir / "perturbed.algebroid.json", "--json", out1]) == 1
    assert run(["jacobi", model_dir / "perturbed.algebroid.json", "--json", out2]) == 1
    b1 = out1.read_bytes()
    assert b1 == out2.read_bytes()
    doc = json.loads(b1)
    assert "timing" not in json.dumps(doc)
    assert doc["status"] == "fail"
    assert doc["caps"] == {"arity": 4, "weight": 4}


def test_worker_env_does_not_change_report(model_dir, tmp_path):
    out1 = tmp_path / "w1.json"
    out2 = tmp_path / "w4.json"
    old = os.environ.get("ALGEBROIDKIT_WORKERS")
    try:
        os.environ["ALGEBROIDKIT_WORKERS"] = "1"
        run(["lemmas", model_dir / "rank2.geometric.json", "--json", out1])
        os.environ["ALGEBROIDKIT_WORKERS"] = "4"
        run(["lemmas", model_dir / "rank2.geometric.json", "--json", out2])
    finally:
        if old is None:
            os.environ.pop("ALGEBROIDKIT_WORKERS", None)
        else:
            os.environ["ALGEBROIDKIT_WORKERS"] = old
    assert out1.read_bytes() == out2.read_bytes()


def test_weight_override_recorded(model_dir, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["duality", model_dir / "generic.geometric.json", "--weight", "5", "--json", out]) == 0
    doc = json.loads(out.read_text())
    assert doc["caps"]["weight"] == 5
    # lowering below the stored data is an input error
    assert run(["duality", model_dir / "generic.geometric.json", "--weight", "2"]) == 2
    capsys.readouterr()
