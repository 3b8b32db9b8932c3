import json
import os

import numpy as np
import pytest

from quasicomm.errors import ConfigError, ReportEmissionError
from quasicomm.harness import Ensemble, TrialConfig, emit_report, generate, read_report, run_suite, trial_rng
from quasicomm.harness.cli import main
from quasicomm.harness.config import SUITES
from quasicomm.harness.ensembles import make_admissible
from quasicomm.harness.report import aggregate_records, read_deterministic_section
from quasicomm.funcalc import SQRT
from quasicomm.linalg import OperatorClass, classify, condition_number, general_eig, spectral_norm


class TestEnsembles:
    def test_same_seed_is_bitwise_identical(self):
        for ens in Ensemble:
            a = generate(ens, 5, trial_rng(7, 3))
            b = generate(ens, 5, trial_rng(7, 3))
            np.testing.assert_array_equal(np.asarray(a), np.asarray(b))

    def test_trial_streams_differ(self):
        a = generate(Ensemble.HERMITIAN_GAUSSIAN, 4, trial_rng(7, 0))
        b = generate(Ensemble.HERMITIAN_GAUSSIAN, 4, trial_rng(7, 1))
        assert spectral_norm(a - b) > 0

    def test_class_invariants(self):
        for t in range(30):
            rng = trial_rng(11, t)
            h = generate(Ensemble.HERMITIAN_GAUSSIAN, 6, rng)
            assert classify(h) is OperatorClass.HERMITIAN
            assert spectral_norm(h) == pytest.approx(1.0, rel=1e-14)
            n = generate(Ensemble.NORMAL_RANDOM, 6, rng)
            assert classify(n) <= OperatorClass.NORMAL
            d = generate(Ensemble.DIAGONALIZABLE_RANDOM, 6, rng)
            assert general_eig(d).conditioning < 1e8
            a1, a2 = generate(Ensemble.COMMUTING_DIAGONAL_PAIR, 6, rng)
            np.testing.assert_array_equal(a1 @ a2, a2 @ a1)
            assert np.min(np.abs(np.diag(a1) - np.diag(a2))) >= 0.1
            assert condition_number(a1 - a2) <= 20

    def test_parse_is_forgiving(self):
        assert Ensemble.parse("hermitian-gaussian") is Ensemble.HERMITIAN_GAUSSIAN
        with pytest.raises(ConfigError):
            Ensemble.parse("Wishart")

    def test_sqrt_admissible_spectrum(self):
        a = make_admissible(SQRT, generate(Ensemble.HERMITIAN_GAUSSIAN, 8, trial_rng(0, 0)))
        lam = np.linalg.eigvalsh(a)
        assert lam.min() >= 0.1 - 1e-14 and lam.max() <= 1 + 1e-14


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"suite": "thm3", "eps_grid": (0.5, 0)},
        {"suite": "thm1", "tolerance_overrides": {"nonsense": 1.0}},
        {"suite": "thm1", "tolerance_overrides": {"f_identity": -1.0}},
        {"suite": "thm1", "dim1": 65},
        {"suite": "thm1", "dim2": 0},
        {"suite": "hypothesis-transfer", "function_name": "exp"},
        {"suite": "thm1", "function_name": "tanh"},
        {"suite": "thm1", "function_name": "sqrt", "ensemble": "NormalRandom"},
        {"suite": "commuting", "dim1": 3, "dim2": 4},
        {"suite": "commuting", "ensemble": "HermitianGaussian", "dim1": 3, "dim2": 3},
        {"suite": "nope"},
        {"suite": "thm1", "trials": 0},
        {"suite": "thm1", "seed": -1},
    ])
    def test_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            TrialConfig(**kwargs)

    def test_echo_is_json(self):
        cfg = TrialConfig("thm3", eps_grid=(0.5, 1j))
        echo = json.loads(json.dumps(cfg.echo()))
        assert echo["eps_grid"] == [[0.5, 0.0], [0.0, 1.0]]
        assert echo["tolerances"]["commutator_identity"] == 1e-14


class TestReports:
    def test_round_trip_reproduces_aggregate(self, tmp_path):
        report = run_suite(TrialConfig("thm1", seed=5, trials=6))
        path = emit_report(report, tmp_path / "r.jsonl")
        header, records = read_report(path)
        assert aggregate_records(records) == header["aggregate"] == report.aggregate
        assert [r["trial_index"] for r in records] == list(range(6))
        assert header["version"] and header["generator_id"]
        assert read_deterministic_section(path) == report.deterministic_text()

    def test_emit_failure_leaves_nothing(self, tmp_path):
        report = run_suite(TrialConfig("thm1", trials=2))
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(ReportEmissionError):
            emit_report(report, blocker / "sub" / "r.jsonl")
        target = tmp_path / "dir"
        target.mkdir()
        with pytest.raises(ReportEmissionError):
            emit_report(report, target)  # target is a directory
        assert os.listdir(target) == []
        assert sorted(os.listdir(tmp_path)) == ["dir", "file"]

    def test_timing_is_the_only_nondeterminism(self):
        cfg = TrialConfig("thm4", seed=9, trials=3, function_name="exp")
        a, b = run_suite(cfg), run_suite(cfg)
        assert a.deterministic_text() == b.deterministic_text()
        assert "timing" in json.loads(a.lines()[0])


class TestSuites:
    def test_thm1_reference_run(self):
        report = run_suite(TrialConfig("thm1", seed=42, dim1=4, dim2=3, trials=100, function_name="x2"))
        assert report.all_passed
        assert report.aggregate["max_residual"] <= 1e-9

    def test_lipschitz_probe_identity(self):
        report = run_suite(TrialConfig("lipschitz-probe", trials=5, function_name="identity"))
        for rec in report.records:
            assert rec["probe"]["sup_ratio"] == pytest.approx(1.0, abs=1e-12)
            assert rec["pass"] and rec["margin"] is None

    @pytest.mark.parametrize("suite", SUITES)
    def test_every_suite_passes_by_default(self, suite):
        dim2 = 3 if suite == "commuting" else 2
        report = run_suite(TrialConfig(suite, seed=1, dim1=3, dim2=dim2, trials=5))
        assert report.all_passed, report.records

    def test_parallel_matches_serial(self):
        cfg = TrialConfig("thm3", seed=3, trials=7, function_name="3x2+x")
        assert run_suite(cfg, 1).deterministic_text() == run_suite(cfg, 3).deterministic_text()


class TestCli:
    def test_pass(self, tmp_path, capsys):
        out = tmp_path / "r.jsonl"
        assert main(["thm1", "--trials", "3", "--out", str(out)]) == 0
        assert capsys.readouterr().out.startswith("PASS thm1")
        assert out.exists()

    def test_fail_on_zero_tolerance(self, capsys):
        assert main(["thm4", "--function", "exp", "--trials", "3", "--tol", "oracle=0"]) == 1
        assert capsys.readouterr().out.startswith("FAIL thm4")

    @pytest.mark.parametrize("argv", [
        ["thm3", "--eps-grid=0.5,0"],
        ["thm1", "--tol", "bogus=1"],
        ["thm1", "--tol", "noequals"],
        ["thm1", "--dim1", "100"],
        ["thm1", "--parallel", "0"],
        ["nope"],
        ["hypothesis-transfer", "--function", "sin"],
    ])
    def test_config_errors_exit_2(self, argv):
        with pytest.raises(SystemExit) as exc:
            raise SystemExit(main(argv))
        assert exc.value.code == 2

    def test_negative_shift_grid(self, capsys):
        assert main(["thm3", "--eps-grid=-0.5,0.2j", "--trials", "2"]) == 0
