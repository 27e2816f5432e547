import json
import math
import subprocess
import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

from blockade_sim import cli
from blockade_sim.dynamics import NumericalFailureError
from blockade_sim.experiments import (
    ConfigValidationError,
    ResultTable,
    SweepResult,
    config_hash,
    read_csv,
    run,
    run_sweep2d,
    run_to_files,
    single_drive_check,
    validate_config,
    write_csv,
    write_json,
)

BASE_CIRCUIT = dict(
    omega1=2500.0, omega2=2500.0, g=6.0, G1=150.0, G2=150.0,
    theta_mix=math.pi / 4, eps1=[0.95, 0.0], eps2=1.0,
    gamma1=1.0, gamma2=1.0, Gamma=1.0, Gamma_f=2.0, delta_plus=0.0,
)


def make_config(experiment, numerics=None, circuit=None, output=None):
    cfg = {
        "spec_version": 1,
        "experiment": experiment,
        "circuit": {**BASE_CIRCUIT, **(circuit or {})},
    }
    if numerics:
        cfg["numerics"] = numerics
    if output:
        cfg["output"] = output
    return cfg


def small_sweep_config(delta2=0.0, count=3, cutoff=3, path=None):
    return make_config(
        "sweep2d",
        circuit={"eps1": 1.0, "eps2": 1.0},
        numerics={
            "fock_cutoff": cutoff,
            "delta2": delta2,
            "sweep": {
                "delta_plus": {"min": -10.0, "max": 10.0, "count": count},
                "theta_drive": {"min": -math.pi, "max": math.pi, "count": count},
            },
        },
        output={"path": str(path), "format": "csv"} if path else None,
    )


class TestValidation:
    def test_good_config_passes(self):
        config = validate_config(make_config("steady", numerics={"fock_cutoff": 4}))
        assert config.experiment == "steady"
        assert config.fock_cutoff == 4

    def test_unknown_fields_rejected_everywhere(self):
        cfg = make_config("steady")
        cfg["surprise"] = 1
        cfg["circuit"]["omega3"] = 5.0
        cfg["numerics"] = {"fock_cutoff": 4, "极mesh": 2}
        cfg["output"] = {"path": "x.csv", "compression": "zip"}
        with pytest.raises(ConfigValidationError) as err:
            validate_config(cfg)
        message = str(err.value)
        for fragment in ("surprise", "omega3", "极mesh", "compression"):
            assert fragment in message

    def test_wrong_spec_version(self):
        cfg = make_config("steady")
        cfg["spec_version"] = 2
        with pytest.raises(ConfigValidationError, match="spec_version"):
            validate_config(cfg)

    def test_unknown_experiment(self):
        with pytest.raises(ConfigValidationError, match="experiment"):
            validate_config(make_config("teleport"))

    def test_cutoff_and_axis_bounds(self):
        with pytest.raises(ConfigValidationError, match="fock_cutoff"):
            validate_config(make_config("steady", numerics={"fock_cutoff": 2}))
        cfg = small_sweep_config()
        cfg["numerics"]["sweep"]["theta_drive"]["count"] = 1
        with pytest.raises(ConfigValidationError, match="count"):
            validate_config(cfg)

    def test_sweep_requires_delta2(self):
        cfg = small_sweep_config()
        del cfg["numerics"]["delta2"]
        with pytest.raises(ConfigValidationError, match="delta2"):
            validate_config(cfg)

    def test_negative_rate_rejected(self):
        with pytest.raises(ConfigValidationError, match="gamma1"):
            validate_config(make_config("steady", circuit={"gamma1": -1.0}))


class TestWriters:
    def test_csv_roundtrip_with_complex_and_null(self, tmp_path):
        table = ResultTable({
            "x": [1.0, 2.0, 3.0],
            "amp": [1 + 2j, 0.5 - 1j, 0j],
            "maybe": [0.25, None, 4.0],
        })
        path = tmp_path / "t.csv"
        write_csv(table, path)
        text = path.read_text()
        assert text.splitlines()[0] == "x,amp_re,amp_im,maybe"
        assert "\r" not in text
        back = read_csv(path)
        assert back.columns["amp"][1] == 0.5 - 1j
        assert back.columns["maybe"][1] is None
        assert back.columns["maybe"][2] == 4.0

    def test_seventeen_significant_digits(self, tmp_path):
        value = 1 / 3
        path = tmp_path / "t.csv"
        write_csv(ResultTable({"v": [value]}), path)
        assert float(path.read_text().splitlines()[1]) == value

    def test_json_writer_nulls(self, tmp_path):
        path = tmp_path / "t.json"
        write_json(ResultTable({"v": [1.0, None], "c": [1j, 2 + 0j]}), path)
        payload = json.loads(path.read_text())
        assert payload["v"] == [1.0, None]
        assert payload["c"] == [[0.0, 1.0], [2.0, 0.0]]


class TestExperiments:
    def test_rates_table_values(self):
        table = run(validate_config(make_config("rates_table", circuit={"g": 0.0})))
        rates = dict(zip(table.columns["n_photon"], table.columns["theta_n_over_2pi_mhz"]))
        assert 17.1 <= rates[2] <= 18.9
        assert 1.0 <= rates[3] <= 1.2

    def test_steady_experiment(self):
        table = run(validate_config(make_config("steady", numerics={"fock_cutoff": 4})))
        assert table.columns["P_00"][0] > 0.5
        assert table.columns["g21"][0] < 0.1
        assert table.columns["max_multiphoton"][0] < 5e-3

    def test_steady_convergence_check_passes_when_converged(self):
        # weak drive keeps occupations tiny, so dimension 4 is already
        # converged well inside the 1e-6 band
        cfg = make_config("steady", circuit={"eps1": 0.3, "eps2": 0.3},
                          numerics={"fock_cutoff": 4, "convergence_check": True})
        table = run(validate_config(cfg))
        assert table.columns["cutoff_convergence_delta"][0] < 1e-6

    def test_steady_convergence_check_rejects_tight_cutoff(self):
        cfg = make_config("steady", numerics={"fock_cutoff": 4, "convergence_check": True})
        with pytest.raises(NumericalFailureError, match="fock_cutoff"):
            run(validate_config(cfg))

    def test_steady_without_drive_yields_null_correlations(self):
        cfg = make_config("steady", circuit={"eps1": 0.0, "eps2": 0.0},
                          numerics={"fock_cutoff": 3})
        table = run(validate_config(cfg))
        assert table.columns["g21"][0] is None
        assert table.columns["g23"][0] is None

    def test_evolve_experiment_truncation_fidelity(self):
        cfg = make_config("evolve", numerics={"fock_cutoff": 4, "t_max": 3.0, "t_points": 61})
        table = run(validate_config(cfg))
        assert min(table.columns["p_sum"]) > 0.97

    def test_g2tau_experiment(self):
        cfg = make_config("g2tau", numerics={"fock_cutoff": 4, "tau_max": 10.0, "tau_points": 11})
        table = run(validate_config(cfg))
        for port in (1, 2, 3):
            curve = table.columns[f"g2{port}"]
            assert curve[0] < 0.1
            assert curve[-1] == pytest.approx(1.0, abs=0.05)

    def test_qpd_experiment_shape(self):
        cfg = make_config("qpd", numerics={"fock_cutoff": 3, "qpd_resolution": 21,
                                           "s_values": [0.0, -1.0]})
        table = run(validate_config(cfg))
        assert len(table.columns["value"]) == 2 * 21 * 21
        husimi = [v for s, v in zip(table.columns["s"], table.columns["value"]) if s == -1.0]
        assert min(husimi) > -1e-12

    def test_negativity_vs_beta_experiment(self):
        cfg = make_config("negativity_vs_beta",
                          numerics={"fock_cutoff": 3, "delta2": 10.0,
                                    "beta_values": [0.5, 1.0, 2.0]})
        table = run(validate_config(cfg))
        e_c = dict(zip(table.columns["beta"], table.columns["e_c"]))
        assert e_c[1.0] > 0
        assert e_c[1.0] > e_c[0.5]
        assert e_c[1.0] > e_c[2.0]


@pytest.fixture(scope="module")
def report():
    cfg = validate_config(make_config("single_drive", numerics={"fock_cutoff": 5}))
    return single_drive_check(cfg)


class TestSingleDrive:
    def test_all_ports_blockaded(self, report):
        assert report["all_blockaded"]
        assert max(report["g21"], report["g22"], report["g23"]) < 0.1

    def test_splitting_is_dispersive_shift(self, report):
        # with g = 0 the supermode splitting is 4 Gx^2 / (3 Omega+) alone
        assert report["delta2"] == pytest.approx(4 * 150.0**2 / (3 * 2500.0), rel=1e-12)
        assert report["splitting_to_drive_ratio"] > 10

    def test_degenerate_control_destroys_blockade(self):
        cfg = validate_config(make_config("single_drive", numerics={"fock_cutoff": 5}))
        control = single_drive_check(cfg, force_degenerate=True)
        assert max(control["g21"], control["g22"], control["g23"]) > 0.1


class TestSweep:
    def test_serial_and_parallel_agree_bitwise(self, tmp_path):
        path1, path2 = tmp_path / "serial.csv", tmp_path / "parallel.csv"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            run_to_files(small_sweep_config(path=path1), jobs=1)
            run_to_files(small_sweep_config(path=path2), jobs=2)
        assert path1.read_bytes() == path2.read_bytes()

    def test_rerun_is_byte_identical(self, tmp_path):
        path = tmp_path / "out.csv"
        cfg = small_sweep_config(path=path)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            run_to_files(cfg, jobs=1)
            first = path.read_bytes()
            run_to_files(cfg, jobs=1)
        assert path.read_bytes() == first

    def test_sweep_round_trip_through_csv(self, tmp_path):
        path = tmp_path / "out.csv"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res, _ = run_to_files(small_sweep_config(path=path), jobs=1)
        back = SweepResult.from_table(read_csv(path), "delta_plus", "theta_drive")
        assert np.allclose(back.axis1, res.axis1)
        assert np.allclose(back.axis2, res.axis2)
        for name, matrix in res.observables.items():
            for i in range(len(res.axis1)):
                for j in range(len(res.axis2)):
                    a, b = matrix[i][j], back.observables[name][i][j]
                    assert (a is None and b is None) or a == pytest.approx(b, rel=1e-15)

    def test_center_point_is_blockaded(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = run_sweep2d(validate_config(small_sweep_config()), jobs=1)
        center = res.observables["log10_g21"][1][1]  # delta+ = 0, theta = 0
        assert center is not None and center < -1

    def test_manifest_contents(self, tmp_path):
        path = tmp_path / "out.csv"
        cfg = small_sweep_config(path=path)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            run_to_files(cfg, jobs=1)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["config_sha256"] == config_hash(cfg)
        assert manifest["solver"]["fock_cutoff"] == 3
        assert manifest["experiment"] == "sweep2d"


class TestCli:
    def write_config(self, tmp_path, cfg):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_validate_ok(self, tmp_path, capsys):
        path = self.write_config(tmp_path, make_config("rates_table", circuit={"g": 0.0}))
        assert cli.main(["validate", "--config", str(path)]) == 0
        assert "config OK" in capsys.readouterr().out

    def test_validate_failure_exit_2(self, tmp_path, capsys):
        path = self.write_config(tmp_path, {"spec_version": 3})
        assert cli.main(["validate", "--config", str(path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_run_writes_output(self, tmp_path):
        out = tmp_path / "rates.csv"
        cfg = make_config("rates_table", circuit={"g": 0.0},
                          output={"path": str(out), "format": "csv"})
        path = self.write_config(tmp_path, cfg)
        assert cli.main(["run", "--config", str(path), "--jobs", "1"]) == 0
        assert out.exists()
        assert (tmp_path / "manifest.json").exists()

    def test_run_out_override(self, tmp_path):
        out = tmp_path / "override.csv"
        path = self.write_config(tmp_path, make_config("rates_table", circuit={"g": 0.0}))
        assert cli.main(["run", "--config", str(path), "--out", str(out), "--jobs", "1"]) == 0
        assert out.exists()

    def test_numerical_failure_exit_3(self, tmp_path, monkeypatch, capsys):
        path = self.write_config(tmp_path, make_config("rates_table", circuit={"g": 0.0}))

        def explode(*args, **kwargs):
            raise NumericalFailureError("synthetic failure")

        monkeypatch.setattr("blockade_sim.experiments.run", explode)
        monkeypatch.setattr("blockade_sim.cli.run_to_files",
                            lambda raw, out_path=None, jobs=1: explode())
        assert cli.main(["run", "--config", str(path)]) == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_console_script_installed(self, tmp_path):
        path = self.write_config(tmp_path, make_config("rates_table", circuit={"g": 0.0}))
        proc = subprocess.run(
            ["blockade-sim", "validate", "--config", str(path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "config OK" in proc.stdout
