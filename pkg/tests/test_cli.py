import numpy as np
import pytest

from cubewalk.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def system_file(tmp_path, capsys):
    path = tmp_path / "sys.txt"
    code = main(["gen", "--seed", "11", "--n", "4", "--gamma", "0.3", "--out", str(path)])
    capsys.readouterr()
    assert code == 0
    return str(path)


class TestGen:
    def test_same_seed_same_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(["gen", "--seed", "7", "--n", "3", "--out", str(a)]) == 0
        assert main(["gen", "--seed", "7", "--n", "3", "--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_seed_required(self, capsys):
        code, _, err = run_cli(capsys, "gen", "--n", "3")
        assert code == 1
        assert "seed" in err

    def test_two_evolution_systems_draw_phases(self, tmp_path, capsys):
        path = tmp_path / "q2.txt"
        assert main(["gen", "--seed", "3", "--n", "2", "--q", "2", "--out", str(path)]) == 0
        capsys.readouterr()
        body = path.read_text()
        coin_lines = [
            line for line in body.splitlines() if line and line[0].isdigit() and " " in line
        ]
        for line in coin_lines:
            theta, phi, lam = (float(x) for x in line.split())
            assert phi != 0.0 and lam != 0.0

    def test_stdout_when_no_out(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "--seed", "1", "--n", "2")
        assert code == 0
        assert out.startswith("#")
        assert "[walk]" in out


class TestSolve:
    def test_zero_order_reports_b(self, system_file, capsys):
        code, out, _ = run_cli(
            capsys, "solve", system_file, "--c", "0", "--ns-schedule", "10",
            "--component", "2", "--seed", "1",
        )
        assert code == 0
        report = {
            key.strip(): value.strip()
            for key, _, value in (line.partition("=") for line in out.splitlines())
            if value
        }
        from cubewalk.fileio import read_system_path

        system = read_system_path(system_file)
        assert float(report["estimate"]) == pytest.approx(system.b[2], abs=1e-12)
        assert float(report["std_error"]) == 0.0
        assert "exact" in report and "rel_error" in report

    def test_report_fields(self, system_file, capsys):
        code, out, _ = run_cli(
            capsys, "solve", system_file, "--ns-schedule", "5000", "--seed", "2"
        )
        assert code == 0
        for field in ("estimate", "std_error", "exact", "rel_error", "wall_time_s", "sampler"):
            assert field in out

    def test_single_schedule_enforced(self, system_file, capsys):
        code, _, err = run_cli(
            capsys, "solve", system_file, "--ns-schedule", "100,1000", "--seed", "2"
        )
        assert code == 1
        assert "single sampling count" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "solve", "nonexistent.txt")
        assert code == 3

    def test_malformed_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("[walk]\nn = 1\nq = 1\norder = ascending\nkind = quantum\n0 0\n")
        code, _, err = run_cli(capsys, "solve", str(bad))
        assert code == 3
        assert "line 6" in err

    def test_invalid_gamma_is_validation_failure(self, tmp_path, capsys, system_file):
        text = open(system_file).read().replace("gamma = 0.29999999999999999", "gamma = 1.5")
        bad = tmp_path / "badgamma.txt"
        bad.write_text(text)
        code, _, err = run_cli(capsys, "solve", str(bad))
        assert code == 2

    def test_sampler_mismatch_is_usage(self, system_file, capsys):
        code, _, err = run_cli(
            capsys, "solve", system_file, "--sampler", "classical-bitflip",
            "--ns-schedule", "100",
        )
        assert code == 1

    def test_all_components(self, system_file, capsys):
        code, out, _ = run_cli(
            capsys, "solve", system_file, "--component", "all", "--c", "0",
            "--ns-schedule", "10", "--seed", "1",
        )
        assert code == 0
        assert sum(line.startswith("x[") for line in out.splitlines()) == 16
        assert "norm_estimate" in out and "norm_exact" in out
        from cubewalk.fileio import read_system_path

        system = read_system_path(system_file)
        # c=0 estimates are exactly b, so the norms agree to print precision
        for line in out.splitlines():
            if line.startswith("norm_estimate"):
                assert float(line.split("=")[1]) == pytest.approx(
                    np.linalg.norm(system.b), rel=1e-10
                )

    def test_bad_component_is_usage(self, system_file, capsys):
        code, _, err = run_cli(capsys, "solve", system_file, "--component", "few")
        assert code == 1
        assert "component" in err

    def test_converge_rejects_all(self, system_file, capsys):
        code, _, err = run_cli(
            capsys, "converge", system_file, "--component", "all",
            "--ns-schedule", "100,200", "--runs", "2",
        )
        assert code == 1


class TestConverge:
    def test_csv_and_plot(self, system_file, tmp_path, capsys):
        out = tmp_path / "conv.csv"
        code, _, _ = run_cli(
            capsys, "converge", system_file, "--ns-schedule", "100,1000",
            "--runs", "3", "--seed", "5", "--out", str(out), "--plot",
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n_s,mean_rel_error,std_rel_error,runs"
        assert len(lines) == 3
        png = tmp_path / "conv.png"
        assert png.read_bytes()[:4] == b"\x89PNG"

    def test_byte_identical_across_threads(self, system_file, tmp_path, capsys):
        outputs = []
        for threads in ("1", "3"):
            path = tmp_path / f"conv{threads}.csv"
            code, _, _ = run_cli(
                capsys, "converge", system_file, "--ns-schedule", "100,1000",
                "--runs", "2", "--seed", "5", "--threads", threads, "--out", str(path),
            )
            assert code == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_plot_without_out_needs_path(self, system_file, capsys):
        code, _, err = run_cli(
            capsys, "converge", system_file, "--ns-schedule", "100,200",
            "--runs", "2", "--seed", "5", "--plot",
        )
        assert code == 1

    def test_stdout_csv(self, system_file, capsys):
        code, out, _ = run_cli(
            capsys, "converge", system_file, "--ns-schedule", "100,200",
            "--runs", "2", "--seed", "5",
        )
        assert code == 0
        assert out.startswith("n_s,")


class TestMatrix:
    def test_dump_and_summary(self, system_file, tmp_path, capsys):
        dump = tmp_path / "m.txt"
        code, out, _ = run_cli(capsys, "matrix", system_file, "--out", str(dump))
        assert code == 0
        first = dump.read_text().splitlines()[0]
        assert first == "16 4"
        assert "condition_number" in out
        assert "condition_bound" in out
        assert "factorisable: no" in out  # generic quantum walk

    def test_classical_factorises(self, tmp_path, capsys):
        path = tmp_path / "cl.txt"
        assert main(
            ["gen", "--seed", "2", "--n", "3", "--kind", "classical", "--out", str(path)]
        ) == 0
        capsys.readouterr()
        code, out, _ = run_cli(capsys, "matrix", str(path), "--out", str(tmp_path / "m.txt"))
        assert code == 0
        assert "factorisable: yes" in out

    def test_stdout_dump_keeps_summary_as_comments(self, system_file, capsys):
        code, out, _ = run_cli(capsys, "matrix", system_file)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "16 4"
        assert any(line.startswith("# condition_number") for line in lines)


class TestValidate:
    def test_all_checks_pass(self, capsys):
        code, out, _ = run_cli(capsys, "validate")
        assert code == 0
        assert "[PASS]" in out
        assert "[FAIL]" not in out
        # headline checks are listed
        assert "gray-permuted classical" in out
        assert "(0 3 2 1)" in out


class TestConfigFile:
    def test_config_supplies_defaults(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("seed = 12\nn = 3\nkind = classical\n")
        out = tmp_path / "sys.txt"
        code, _, _ = run_cli(capsys, "gen", "--config", str(cfg), "--out", str(out))
        assert code == 0
        assert "kind = classical" in out.read_text()
        assert "n = 3" in out.read_text()

    def test_cli_overrides_config(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("seed = 12\nn = 3\n")
        out = tmp_path / "sys.txt"
        code, _, _ = run_cli(
            capsys, "gen", "--config", str(cfg), "--n", "2", "--out", str(out)
        )
        assert code == 0
        assert "n = 2" in out.read_text()

    def test_missing_config_file(self, capsys):
        code, _, _ = run_cli(capsys, "gen", "--config", "nope.cfg", "--seed", "1")
        assert code == 3


class TestUsage:
    def test_no_command_prints_help(self, capsys):
        code, out, _ = run_cli(capsys)
        assert code == 1

    def test_unknown_command(self, capsys):
        code, _, err = run_cli(capsys, "teleport")
        assert code == 1

    def test_bad_schedule(self, system_file, capsys):
        code, _, err = run_cli(capsys, "solve", system_file, "--ns-schedule", "5,4")
        assert code == 1
        assert "increasing" in err
