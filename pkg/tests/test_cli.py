import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from iqcc.cli import main
from iqcc.pauli_sum import PauliSum, to_json

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def runner():
    return CliRunner()


def _strip_volatile(report: dict) -> dict:
    """Drop wall-clock fields so reports can be compared byte for byte."""
    report = json.loads(json.dumps(report))
    report["manifest"].pop("timestamps", None)

    def scrub(node):
        if isinstance(node, dict):
            node.pop("wall_time_s", None)
            for v in node.values():
                scrub(v)
        elif isinstance(node, list):
            for v in node:
                scrub(v)

    scrub(report)
    return report


class TestTransform:
    def test_h2(self, runner, tmp_path):
        out = tmp_path / "h2.json"
        result = runner.invoke(
            main, ["transform", str(FIXTURES / "h2.fcidump"), "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["n_qubits"] == 4
        assert len(data["terms"]) == 15  # recorded at fixture creation
        assert data["n_electrons"] == 2
        assert data["manifest"]["input"]["sha256"]

    def test_missing_file(self, runner):
        result = runner.invoke(main, ["transform", "/nonexistent.fcidump"])
        assert result.exit_code == 2

    def test_lih_cas_window(self, runner, tmp_path):
        out = tmp_path / "lih_cas.json"
        result = runner.invoke(
            main,
            ["transform", str(FIXTURES / "lih.fcidump"),
             "--active-occ", "1", "--active-virt", "1", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["n_qubits"] == 4
        assert data["n_electrons"] == 2

    def test_window_flags_must_pair(self, runner):
        result = runner.invoke(
            main, ["transform", str(FIXTURES / "h2.fcidump"), "--active-occ", "1"]
        )
        assert result.exit_code == 2


class TestRun:
    def test_h2_defaults(self, runner, tmp_path):
        out = tmp_path / "run.json"
        csv = tmp_path / "traj.csv"
        result = runner.invoke(
            main,
            ["run", str(FIXTURES / "h2.fcidump"), "--generators", "1",
             "-o", str(out), "--csv", str(csv)],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report["result"]["converged"] is True
        assert report["manifest"]["config"]["generators_per_iteration"] == 1
        assert csv.read_text().startswith(
            "iteration,energy,energy_with_pt,term_count,dropped_weight"
        )

    def test_max_iterations_zero(self, runner, tmp_path):
        out = tmp_path / "run.json"
        result = runner.invoke(
            main,
            ["run", str(FIXTURES / "h2.fcidump"), "--max-iterations", "0",
             "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        assert report["result"]["n_iterations"] == 0
        assert report["result"]["final_energy"] == report["result"]["initial_energy"]

    def test_capacity_abort_exit_code(self, runner):
        result = runner.invoke(
            main,
            ["run", str(FIXTURES / "h4.fcidump"), "--memory-budget", "50"],
        )
        assert result.exit_code == 1  # domain error: distinct from 0 and 2

    def test_qubit_json_input_needs_electrons(self, runner, tmp_path):
        ham = tmp_path / "h.json"
        ham.write_text(to_json(PauliSum.identity(2, 1.0)))
        result = runner.invoke(main, ["run", str(ham)])
        assert result.exit_code == 2

    def test_config_file_with_flag_override(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"generators_per_iteration": 2, "mu": 0.1}))
        out = tmp_path / "run.json"
        result = runner.invoke(
            main,
            ["run", str(FIXTURES / "h2.fcidump"), "--config", str(cfg),
             "--generators", "1", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads(out.read_text())["manifest"]
        assert manifest["config"]["generators_per_iteration"] == 1  # flag wins
        assert manifest["config"]["mu"] == 0.1

    def test_unknown_config_key(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        result = runner.invoke(
            main, ["run", str(FIXTURES / "h2.fcidump"), "--config", str(cfg)]
        )
        assert result.exit_code == 2


class TestGap:
    def test_h2_gap_report(self, runner, tmp_path, reference_values):
        out = tmp_path / "gap.json"
        result = runner.invoke(
            main,
            ["gap", str(FIXTURES / "h2.fcidump"), "--generators", "2",
             "-o", str(out), "--csv-prefix", str(tmp_path / "t")],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(out.read_text())
        oracle_gap = (
            reference_values["h2"]["fci_triplet"] - reference_values["h2"]["fci_singlet"]
        )
        assert abs(report["result"]["gap_ev"] / 27.211386245988 - oracle_gap) < 2e-5
        assert (tmp_path / "t_singlet.csv").exists()
        assert (tmp_path / "t_triplet.csv").exists()
        assert report["manifest"]["config"]["mu"] == 0.25  # protocol default

    def test_negative_mu_rejected(self, runner):
        result = runner.invoke(
            main, ["gap", str(FIXTURES / "h2.fcidump"), "--mu", "-0.5"]
        )
        assert result.exit_code == 2


class TestOracle:
    def test_identity_hamiltonian(self, runner, tmp_path):
        ham = tmp_path / "id.json"
        ham.write_text(to_json(PauliSum.identity(2, -0.25)))
        result = runner.invoke(main, ["oracle", str(ham)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["energy"] == pytest.approx(-0.25, abs=1e-12)

    def test_h2_fci(self, runner, tmp_path, reference_values):
        ham = tmp_path / "h2.json"
        runner.invoke(
            main, ["transform", str(FIXTURES / "h2.fcidump"), "-o", str(ham)]
        )
        result = runner.invoke(main, ["oracle", str(ham)])
        assert result.exit_code == 0
        energy = json.loads(result.output)["energy"]
        assert abs(energy - reference_values["h2"]["fci_energy"]) < 1e-9

    def test_sector_flag(self, runner, tmp_path, reference_values):
        ham = tmp_path / "h2.json"
        runner.invoke(
            main, ["transform", str(FIXTURES / "h2.fcidump"), "-o", str(ham)]
        )
        result = runner.invoke(main, ["oracle", str(ham), "--sector", "1,1"])
        assert result.exit_code == 0
        energy = json.loads(result.output)["energy"]
        assert abs(energy - reference_values["h2"]["fci_triplet"]) < 1e-9

    def test_capacity_error(self, runner, tmp_path):
        ham = tmp_path / "big.json"
        ham.write_text(to_json(PauliSum.identity(20, 1.0)))
        result = runner.invoke(main, ["oracle", str(ham)])
        assert result.exit_code == 1

    def test_bad_sector_usage(self, runner, tmp_path):
        ham = tmp_path / "id.json"
        ham.write_text(to_json(PauliSum.identity(2, 1.0)))
        result = runner.invoke(main, ["oracle", str(ham), "--sector", "banana"])
        assert result.exit_code == 2


class TestEstimate:
    def test_from_run_report(self, runner, tmp_path):
        out = tmp_path / "run.json"
        runner.invoke(
            main,
            ["run", str(FIXTURES / "h2.fcidump"), "--generators", "1", "-o", str(out)],
        )
        result = runner.invoke(main, ["estimate", str(out)])
        assert result.exit_code == 0
        data = json.loads(result.output)
        # two iterations, one weight-4 entangler each: 2 * 2*(4-1) = 12 CNOTs
        assert data["rz_count"] == data["entangler_count"]
        assert data["cnot_count"] == sum(
            2 * 3 for _ in range(data["entangler_count"])
        )

    def test_empty_report(self, runner, tmp_path):
        report = tmp_path / "empty.json"
        report.write_text(json.dumps({"result": {"iterations": []}}))
        result = runner.invoke(main, ["estimate", str(report)])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data == {"cnot_count": 0, "rz_count": 0, "entangler_count": 0}


class TestDeterminism:
    def test_repeated_run_reports_identical(self, runner, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"run{i}.json"
            result = runner.invoke(
                main,
                ["run", str(FIXTURES / "h2.fcidump"), "--generators", "2",
                 "-o", str(out)],
            )
            assert result.exit_code == 0
            outs.append(json.loads(out.read_text()))
        a, b = (_strip_volatile(r) for r in outs)
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
        digests = [r["manifest"]["determinism"]["numeric_digest"] for r in outs]
        assert digests[0] == digests[1]
