import json
import math

import pytest

from pmeans.cli import main
from pmeans.specialfn import pochhammer


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestSample:
    def test_gem_deterministic_lines(self, capsys):
        argv = ["sample", "gem", "--alpha", "0", "--theta", "1",
                "--samples", "3", "--seed", "1"]
        code, out = run_cli(capsys, *argv)
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 3
        for line in lines:
            rec = json.loads(line)
            assert rec["schema"] == 1
            assert rec["order"] == "size_biased"
            assert abs(sum(rec["weights"]) + rec["defect"] - 1.0) < 1e-12
        code2, out2 = run_cli(capsys, *argv)
        assert out2 == out  # byte-identical rerun

    def test_dirichlet_weights(self, capsys):
        code, out = run_cli(capsys, "sample", "dirichlet", "--theta", "1,1,1",
                            "--seed", "2")
        rec = json.loads(out.strip())
        assert code == 0
        assert len(rec["weights"]) == 3
        assert sum(rec["weights"]) == pytest.approx(1.0, abs=1e-12)

    def test_stable_jumps_and_subordinator(self, capsys):
        code, out = run_cli(capsys, "sample", "stable_jumps", "--alpha", "0.5",
                            "--trunc-tol", "1e-3", "--seed", "3")
        assert code == 0 and json.loads(out.strip())["defect"] <= 1e-3
        code, out = run_cli(capsys, "sample", "subordinator", "--kind", "stable",
                            "--alpha", "0.4", "--lengths", "0.5,1.5", "--seed", "4")
        rec = json.loads(out.strip())
        assert code == 0 and len(rec["weights"]) == 2


class TestExactCommands:
    def test_eppf_value(self, capsys):
        code, out = run_cli(capsys, "eppf", "--alpha", "0.5", "--theta", "0.5",
                            "--composition", "2")
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx(1 / 3)

    def test_ecpf_uniform(self, capsys):
        code, out = run_cli(capsys, "ecpf", "--uniform-m", "2",
                            "--composition", "1,1")
        assert json.loads(out)["value"] == pytest.approx(0.5)

    def test_kn_rows_sum_to_one(self, capsys):
        code, out = run_cli(capsys, "kn", "--n", "6", "--alpha", "0.5",
                            "--theta", "0.5", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "# schema: 1"
        assert lines[1].startswith("# identity:")
        assert lines[2] == "k,prob"
        probs = [float(line.split(",")[1]) for line in lines[3:]]
        assert sum(probs) == pytest.approx(1.0, abs=1e-12)

    def test_moments_dirichlet_closed_form(self, capsys):
        theta, p = 2.0, 0.3
        code, out = run_cli(capsys, "moments", "--alpha", "0", "--theta", "2",
                            "--bernoulli", "0.3", "--order", "3")
        assert code == 0
        rows = json.loads(out)["rows"]
        for j, value in rows:
            target = pochhammer(p * theta, j) / pochhammer(theta, j)
            assert value == pytest.approx(target, abs=1e-12)

    def test_crp_deterministic(self, capsys):
        argv = ["crp", "--alpha", "0.5", "--theta", "0.5", "--n", "12",
                "--samples", "2", "--seed", "9"]
        _, out1 = run_cli(capsys, *argv)
        _, out2 = run_cli(capsys, *argv)
        assert out1 == out2
        blocks = json.loads(out1.strip().split("\n")[0])["blocks"]
        assert sum(blocks) == 12


class TestTables:
    def test_density_csv(self, capsys):
        code, out = run_cli(capsys, "density", "--which", "talzol", "--alpha",
                            "0.5", "--grid=-2:2:5", "--format", "csv")
        assert code == 0
        rows = [line for line in out.split("\n") if line and not line.startswith("#")]
        assert rows[0] == "grid,density"
        mid = rows[3].split(",")
        assert float(mid[0]) == 0.0
        assert float(mid[1]) == pytest.approx(1.0 / math.pi)

    def test_transform_matches_library(self, capsys):
        from pmeans.discrete import AlphaTheta
        from pmeans.pmean import AtomicDistribution, cs_transform_rhs

        code, out = run_cli(capsys, "transform", "--which", "cs", "--alpha", "0.5",
                            "--theta", "2", "--bernoulli", "0.4", "--lam", "1,4")
        rows = json.loads(out)["rows"]
        x = AtomicDistribution.bernoulli(0.4)
        for lam, value in rows:
            assert value == pytest.approx(
                cs_transform_rhs(AlphaTheta(0.5, 2.0), x, lam), rel=1e-14
            )

    def test_figure_discriminant_meta(self, capsys):
        code, out = run_cli(capsys, "figure", "--name", "discriminant",
                            "--points", "17")
        obj = json.loads(out)
        assert obj["alpha_critical"] == pytest.approx(0.736484, abs=1e-5)
        assert obj["inflection_abscissa"] == pytest.approx(0.278018, abs=1e-5)

    def test_figure_ratio_densities_csv(self, capsys):
        code, out = run_cli(capsys, "figure", "--name", "ratio_densities",
                            "--points", "9", "--format", "csv")
        assert code == 0
        lines = [line for line in out.split("\n") if line and not line.startswith("#")]
        assert lines[0] == "alpha,variable,grid,density"
        assert len(lines) - 1 == 7 * 2 * 9

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "table.csv"
        code, _ = run_cli(capsys, "kn", "--n", "3", "--uniform-m", "2",
                          "--format", "csv", "--out", str(path))
        assert code == 0
        assert path.read_text().startswith("# schema: 1")


class TestVerifyCommand:
    def test_single_check_passes(self, capsys):
        code, out = run_cli(capsys, "verify", "--check", "mellin_stable",
                            "--seed", "4", "--samples", "20000")
        assert code == 0
        lines = out.strip().split("\n")
        assert len(lines) == 1
        rec = json.loads(lines[0])
        assert rec["passed"] is True and rec["seed"] == 4

    def test_perturbed_check_fails_with_exit_one(self, capsys):
        code, out = run_cli(capsys, "verify", "--check", "mellin_stable",
                            "--seed", "4", "--samples", "20000", "--perturb")
        assert code == 1
        assert json.loads(out.strip())["passed"] is False

    def test_needs_check_or_all(self, capsys):
        with pytest.raises(SystemExit):
            main(["verify"])


class TestErrors:
    def test_invalid_params_exit_code(self, capsys):
        code, _ = run_cli(capsys, "eppf", "--alpha", "2", "--theta", "1",
                          "--composition", "2")
        assert code == 2

    def test_unknown_figure_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["figure", "--name", "nope"])
