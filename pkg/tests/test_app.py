"""
Unit tests for the semwave command line.
Tests exit codes, config files, output files and reproducibility.
"""

import json
import math

import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import build_parser, load_config_file, main, resolve, run, UsageError
from embedding_geometry import load_embeddings
from potential_landscape import MexicanHatParams, break_symmetry
from provider_client import EmbeddingCache

SOLITON_TOML = """
initial = "sech"
gamma = -1.0
length = 40.0
points = 512
dt = 1e-3
steps = 2000
record-every = 500
"""


def read(path):
    with open(path, "rb") as f:
        return f.read()


class TestRun:
    """Test suite for run() exit codes and printed results."""

    def test_similarity_fixture(self, tmp_path, capsys):
        """Test dog/cat on the shipped fixture prints 0.5."""
        code = run(["similarity", "--a", "dog", "--b", "cat", "--out", str(tmp_path)])

        out = capsys.readouterr().out.strip()
        assert code == 0
        assert float(out) == pytest.approx(0.5, abs=1e-12)
        assert os.path.exists(tmp_path / "manifest.json")

    def test_similarity_rank_csv(self, tmp_path):
        """Test --rank writes a ranking table."""
        run(["similarity", "--a", "no", "--b", "No", "--rank", "--out", str(tmp_path)])

        lines = (tmp_path / "ranking.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "token,cosine_similarity"
        assert lines[1] == "no,1.0"

    def test_unknown_flag(self, capsys):
        """Test an unknown flag exits 2 with usage text."""
        code = run(["similarity", "--a", "dog", "--b", "cat", "--frobnicate"])

        err = capsys.readouterr().err
        assert code == 2
        assert "usage" in err

    def test_unknown_subcommand(self, capsys):
        """Test an unknown subcommand exits 2."""
        assert run(["teleport"]) == 2

    def test_invalid_value_named(self, tmp_path, capsys):
        """Test a bad numeric parameter is named in the message."""
        code = run(["evolve", "--dt", "-1", "--out", str(tmp_path)])

        assert code == 2
        assert "dt" in capsys.readouterr().err

    def test_runtime_error(self, tmp_path, capsys):
        """Test an unknown token exits 1."""
        code = run(["similarity", "--a", "dog", "--b", "zebra", "--out", str(tmp_path)])

        assert code == 1
        assert "zebra" in capsys.readouterr().err

    def test_estimate_prints_fractions(self, tmp_path, capsys):
        """Test the 6/3/1 tally prints exact frequencies."""
        code = run(["estimate", "--counts", "No.=6,No=3,no=1", "--out", str(tmp_path)])

        out = capsys.readouterr().out.splitlines()
        assert code == 0
        assert out == ["No.: 3/5", "No: 3/10", "no: 1/10"]

    def test_estimate_bad_counts(self, tmp_path):
        """Test a malformed tally is a usage error."""
        assert run(["estimate", "--counts", "yes=many", "--out", str(tmp_path)]) == 2

    def test_complexify_compare(self, tmp_path, capsys):
        """Test complexify writes a state and a complex similarity."""
        code = run(["complexify", "--target", "dog", "--basis", "dog,cat,puppy", "--compare", "cat",
                    "--shots", "50", "--seed", "3", "--out", str(tmp_path)])

        assert code == 0
        state = json.loads((tmp_path / "state.json").read_text(encoding="utf-8"))
        assert state["basis"] == ["dog", "cat", "puppy"]
        assert state["normalized"] is True
        similarity = json.loads((tmp_path / "complex_similarity.json").read_text(encoding="utf-8"))
        assert 0.0 < similarity["magnitude"] <= 1.0 + 1e-12
        measurements = json.loads((tmp_path / "measurements.json").read_text(encoding="utf-8"))
        assert measurements["total"] == 50

    def test_interfere_sweep(self, tmp_path):
        """Test the sweep CSV has one row per point."""
        code = run(["interfere", "--a", "dog", "--b", "cat", "--sweep", "5", "--out", str(tmp_path)])

        lines = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert code == 0
        assert lines[0] == "x_index,total,direct1,direct2,interference"
        assert len(lines) == 6

    def test_greens_table(self, tmp_path):
        """Test Green's function samples in CSV."""
        code = run(["greens", "--dims", "3", "--r-min", "1", "--r-max", "2", "--samples", "2",
                    "--out", str(tmp_path)])

        lines = (tmp_path / "greens.csv").read_text(encoding="utf-8").splitlines()
        assert code == 0
        assert lines[0] == "r,G"
        r, g = lines[1].split(",")
        assert float(r) == 1.0
        assert float(g) == pytest.approx(1.0 / (4 * math.pi), abs=1e-15)

    def test_greens_range(self, tmp_path):
        """Test r_max must exceed r_min."""
        assert run(["greens", "--r-min", "2", "--r-max", "1", "--out", str(tmp_path)]) == 2

    def test_action_json(self, tmp_path):
        """Test the action breakdown JSON carries terms and total."""
        code = run(["action", "--steps", "4", "--nonlinearity", "cubic", "--gamma", "-1",
                    "--format", "json", "--out", str(tmp_path)])

        payload = json.loads((tmp_path / "action.json").read_text(encoding="utf-8"))
        assert code == 0
        assert set(payload) == {"terms", "total"}
        assert {"time_kinetic", "gradient", "nonlinear"} <= set(payload["terms"])
        assert payload["total"] == pytest.approx(math.fsum(payload["terms"].values()), abs=1e-10)

    def test_vacuum_seeded(self, tmp_path):
        """Test the vacuum angle follows the seed."""
        code = run(["vacuum", "--mu2", "1", "--lam", "0.25", "--seed", "11", "--out", str(tmp_path)])

        vacuum = json.loads((tmp_path / "vacuum.json").read_text(encoding="utf-8"))
        assert code == 0
        assert vacuum["theta"] == break_symmetry(MexicanHatParams(1.0, 0.25), 11).theta
        assert vacuum["magnitude"] == pytest.approx(1.0)
        assert (tmp_path / "potential.csv").read_text(encoding="utf-8").startswith("x,V(x)\n")

    def test_scan_fixture(self, tmp_path, capsys):
        """Test the scan ranks fixture letters."""
        code = run(["scan", "--a", "dog", "--b", "cat", "--alphabet", "abcx", "--out", str(tmp_path)])

        lines = (tmp_path / "scan.csv").read_text(encoding="utf-8").splitlines()
        assert code == 0
        assert lines[0] == "candidate,length,delta_d"
        assert [row.split(",")[0] for row in lines[1:]] == ["a", "x", "b", "c"]
        assert capsys.readouterr().out.startswith("length 1: a ")


class TestEvolveRuns:
    """Test suite for evolve runs driven by config files."""

    @pytest.fixture
    def config_path(self, tmp_path):
        path = tmp_path / "soliton.toml"
        path.write_text(SOLITON_TOML, encoding="utf-8")
        return str(path)

    def test_soliton_config(self, tmp_path, config_path):
        """Test the soliton scenario writes the series, charge report and snapshot."""
        out = tmp_path / "run"

        code = run(["evolve", "--config", config_path, "--out", str(out)])

        assert code == 0
        lines = (out / "series.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "time,norm,energy,mean_x,p_left,p_right"
        assert len(lines) == 6
        assert lines[1].endswith(",,")
        charge = json.loads((out / "charge.json").read_text(encoding="utf-8"))
        assert charge["verdict"] == "conserved"
        assert os.path.getsize(out / "final_field.bin") == 512 * 16

    def test_manifest(self, tmp_path, config_path):
        """Test the manifest records the resolved config, seed and outputs."""
        out = tmp_path / "run"
        run(["evolve", "--config", config_path, "--steps", "1000", "--seed", "5", "--out", str(out)])

        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))

        assert manifest["subcommand"] == "evolve"
        assert manifest["seed"] == 5
        assert manifest["config"]["steps"] == 1000
        assert manifest["config"]["gamma"] == -1.0
        assert manifest["config"]["config_file"] == config_path
        assert {"series.csv", "charge.json", "final_field.json", "final_field.bin"} <= set(manifest["outputs"])
        assert {"numpy", "scipy", "python", "semwave"} <= set(manifest["versions"])

    def test_byte_identical_rerun(self, tmp_path, config_path):
        """Test identical runs produce identical data files."""
        first, second = tmp_path / "a", tmp_path / "b"

        run(["evolve", "--config", config_path, "--out", str(first)])
        run(["evolve", "--config", config_path, "--out", str(second)])

        for name in ("series.csv", "charge.json", "final_field.bin", "final_field.json"):
            assert read(first / name) == read(second / name)

    def test_unknown_config_key(self, tmp_path):
        """Test a config file with an unknown parameter exits 2."""
        path = tmp_path / "bad.toml"
        path.write_text("warp_factor = 9\n", encoding="utf-8")

        assert run(["evolve", "--config", str(path), "--out", str(tmp_path)]) == 2

    def test_batch_configs(self, tmp_path):
        """Test several configs run into per-config directories."""
        paths = []
        for name, dims in (("three", 3), ("four", 4)):
            path = tmp_path / f"{name}.json"
            path.write_text(json.dumps({"dims": dims, "samples": 3}), encoding="utf-8")
            paths.append(str(path))
        out = tmp_path / "batch"

        code = run(["greens", "--config", paths[0], "--config", paths[1], "--out", str(out)])

        assert code == 0
        assert (out / "three" / "greens.csv").exists()
        assert (out / "four" / "greens.csv").exists()


class TestConfigFiles:
    """Test suite for config resolution."""

    def test_hyphen_keys(self, tmp_path):
        """Test hyphenated keys map to argument names."""
        path = tmp_path / "c.toml"
        path.write_text('record-every = 7\ninitial = "sech"\n', encoding="utf-8")

        assert load_config_file(str(path)) == {"record_every": 7, "initial": "sech"}

    def test_flags_override_file(self, tmp_path):
        """Test command-line flags win over file values."""
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"steps": 50, "gamma": 0.5}), encoding="utf-8")

        (args,) = resolve(["evolve", "--config", str(path), "--steps", "9"])

        assert args.steps == 9
        assert args.gamma == 0.5

    def test_unsupported_extension(self, tmp_path):
        """Test only TOML and JSON files are accepted."""
        path = tmp_path / "c.yaml"
        path.write_text("steps: 3\n", encoding="utf-8")

        with pytest.raises(UsageError):
            load_config_file(str(path))

    def test_subcommands_registered(self):
        """Test every subcommand is available."""
        assert set(build_parser().subcommands) == {
            "similarity", "complexify", "estimate", "interfere", "evolve", "tunnel",
            "greens", "action", "scan", "fetch", "vacuum",
        }


class TestFetch:
    """Test suite for the fetch subcommand."""

    def test_warm_cache(self, tmp_path, monkeypatch, capsys):
        """Test a fully cached fetch needs no network and no credential."""
        cache_dir = str(tmp_path / "cache")
        cache = EmbeddingCache(cache_dir)
        cache.put("fixture-model", "dog", [1.0, 1.0, 0.0])
        cache.put("fixture-model", "cat", [1.0, 0.0, 1.0])
        monkeypatch.delenv("SEMWAVE_API_KEY", raising=False)
        out = tmp_path / "out"

        code = run(["fetch", "--tokens", "dog,cat,dog", "--model", "fixture-model",
                    "--cache-dir", cache_dir, "--out", str(out)])

        assert code == 0
        embeddings = load_embeddings(str(out / "embeddings.jsonl"), "jsonl")
        assert embeddings.tokens == ["dog", "cat"]
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert "embeddings.jsonl" in manifest["outputs"]
        summary = json.loads((out / "fetch.json").read_text(encoding="utf-8"))
        assert summary["dim"] == 3
        assert "credential_env" not in summary["provider"]

    def test_missing_credential(self, tmp_path, monkeypatch, capsys):
        """Test a cold fetch without a credential exits 1 naming the variable."""
        monkeypatch.delenv("SEMWAVE_API_KEY", raising=False)

        code = run(["fetch", "--tokens", "dog", "--cache-dir", str(tmp_path / "empty"),
                    "--credential-env", "SEMWAVE_API_KEY", "--out", str(tmp_path / "out")])

        assert code == 1
        assert "SEMWAVE_API_KEY" in capsys.readouterr().err

    def test_no_tokens(self, tmp_path):
        """Test fetch without tokens is a usage error."""
        assert run(["fetch", "--out", str(tmp_path)]) == 2


class TestMain:
    """Test suite for the process entry point."""

    def test_exit_code_passthrough(self, mocker):
        """Test main exits with the code run returns."""
        mocker.patch("app.run", return_value=2)

        with pytest.raises(SystemExit) as exc_info:
            main()

        assert exc_info.value.code == 2

    def test_help_exits_zero(self, capsys):
        """Test --help prints usage and returns 0."""
        assert run(["--help"]) == 0
        assert "semwave" in capsys.readouterr().out
