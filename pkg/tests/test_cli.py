"""Command line behavior, exercised in-process through main(argv).

Exit code contract: 0 done, 2 resource limit, 3 invalid input (including
argparse usage errors, which would otherwise exit 2 and collide).
"""

import json

import numpy as np
import pytest

from thermalcert.cli import main, parse_state
from thermalcert.states import ghz_state


# ------------------------------------------------------------ state specs


def test_parse_state_specs():
    assert parse_state("ring:5").dim == 32
    assert np.allclose(parse_state("ghz:4").vector, ghz_state(4).vector)
    assert parse_state("eta4").dim == 16
    with pytest.raises(ValueError):
        parse_state("eta4:junk")
    with pytest.raises(ValueError):
        parse_state("blob:3")
    with pytest.raises(ValueError):
        parse_state("graph:")
    with pytest.raises(ValueError):
        parse_state("file:")


def test_parse_state_amplitude_file(tmp_path):
    path = tmp_path / "amps.json"
    path.write_text(json.dumps([3, [0, 4]]))
    state = parse_state(f"file:{path}")
    assert np.allclose(state.vector, [0.6, 0.8j])
    path.write_text(json.dumps([[1, 2, 3]]))
    with pytest.raises(ValueError):
        parse_state(f"file:{path}")
    path.write_text(json.dumps(["x"]))
    with pytest.raises(ValueError):
        parse_state(f"file:{path}")


# --------------------------------------------------------------- certify


def test_certify_ring_cluster_json(capsys):
    rc = main(["certify", "--state", "ring:5", "--k", "2", "--delta", "0.03125"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "certified"
    assert payload["target"] == "ring:5"
    assert payload["method"] == "sdp_ball"
    assert payload["alpha"] == 1.0 - 2.0 ** -10
    assert payload["solver"]["status"] == "feasible"


def test_certify_rdm_method(capsys):
    rc = main([
        "certify", "--state", "ring:5", "--k", "2",
        "--delta", "0.03125", "--method", "rdm_maximally_mixed",
    ])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "certified"
    assert payload["alpha"] == 31.0 / 32.0
    assert "solver" not in payload


def test_certify_eta4_full_scope_rdm_rejected(capsys):
    # the chain state's vanishing correlations are a property of the
    # nearest-neighbor scope; over all weight <= 2 strings it has a
    # perfect correlation, so the closed-form route must refuse
    rc = main([
        "certify", "--state", "eta4", "--k", "2",
        "--delta", "0.0625", "--method", "rdm_maximally_mixed",
    ])
    assert rc == 3
    assert "invalid input" in capsys.readouterr().err


def test_certify_ghz_not_certified(capsys):
    rc = main(["certify", "--state", "ghz:3", "--k", "2", "--delta", "1e-3"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "not_certified"


# -------------------------------------------------------------- bad input


def test_exit_codes_for_bad_input(capsys):
    assert main(["certify", "--state", "ring:2", "--k", "1", "--delta", "1e-3"]) == 3
    assert main(["certify", "--state", "blob:3", "--k", "1", "--delta", "1e-3"]) == 3
    assert main(["certify", "--k", "1", "--delta", "1e-3"]) == 3  # missing --state
    assert main(["fractions", "--n", "3", "--k", "2", "--deltas", "1e-3,abc",
                 "--samples", "1"]) == 3
    assert main(["certify", "--state", "file:/no/such/file.json",
                 "--k", "1", "--delta", "1e-3"]) == 3
    capsys.readouterr()


def test_exit_code_for_resource_limit(capsys):
    rc = main(["fractions", "--n", "7", "--k", "2", "--deltas", "1e-3",
               "--samples", "1"])
    assert rc == 2
    assert "resource limit" in capsys.readouterr().err


# -------------------------------------------------------------- fractions


def test_fractions_stdout_reproducible(tmp_path, capsys):
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["fractions", "--n", "3", "--k", "2", "--deltas", "1e-3",
            "--samples", "3", "--seed", "3"]
    assert main(argv + ["--out", str(out_a)]) == 0
    first = capsys.readouterr().out
    assert main(argv + ["--out", str(out_b)]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert out_a.read_bytes() == out_b.read_bytes()
    assert out_a.read_text() == first
    assert first.splitlines()[0] == "delta,samples,detected,fraction,mean_iters,seconds"


# ------------------------------------------------------------------ graph


def test_graph_subcommand(tmp_path, capsys):
    edges = tmp_path / "triangle.txt"
    edges.write_text("0 1\n1 2\n0 2\n")
    rc = main(["graph", "--edges", str(edges), "--min-weight"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "vertices: 3" in out
    assert "(0,1)" in out
    assert "generators:" in out
    assert "min stabilizer weight: 2" in out


def test_graph_subcommand_missing_file(capsys):
    assert main(["graph", "--edges", "/no/such/edges.txt"]) == 3
    capsys.readouterr()


# -------------------------------------------------------------- constants


def test_constants_subcommand(capsys):
    assert main(["constants", "--no-search"]) == 0
    first = capsys.readouterr().out
    assert main(["constants", "--no-search"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert first.startswith("constants report")
    assert "DISAGREES" not in first


# ---------------------------------------------------------- nn-restricted


def test_nn_restricted_subcommand(tmp_path, capsys):
    out = tmp_path / "nn.csv"
    rc = main(["nn-restricted", "--samples", "2", "--seed", "5",
               "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert text.count("delta,samples,detected,fraction,mean_iters,seconds") == 2
    assert "chain state certificate:" in text
    assert '"target": "eta4"' in text
    assert '"status": "certified"' in text
    assert len(out.read_text().splitlines()) == 3
