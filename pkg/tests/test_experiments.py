"""Experiment runner, artifact, resume and CLI tests.

Every run_experiment call here uses miniature parameters (short chains,
a handful of runs) so the whole file stays fast; the full-size operating
points are exercised by the acceptance suite.
"""

import hashlib
import json
import shutil
import subprocess

import numpy as np
import pytest

from spinflux.cli import build_parser, main
from spinflux.experiments import (
    DEFAULT_INPUT,
    EXPERIMENTS,
    NOISE_VARIANTS,
    QUARTER,
    ConfigError,
    ExperimentConfig,
    RunStore,
    _fibonacci_sphere,
    _interior_peak,
    _seed_child,
    compute_keyed,
    emit_report,
    run_experiment,
    run_payload,
    write_csv,
)
from spinflux.hamiltonian import ChainSpec, perfect_transfer_pattern
from spinflux.noise import EvolutionPlan, sample_disorder
from spinflux.qpt import ProcessMatrix
from spinflux.transfer import default_times, ideal_ghz_curve, ideal_transfer_curve


def small_config(experiment, **overrides):
    base = dict(n_qubits=2, n_runs=2, n_steps=16, grid_points=21)
    base.update(overrides)
    return ExperimentConfig(experiment, **base)


class TestExperimentConfig:
    def test_resolved_fills_reference_defaults(self):
        cfg = ExperimentConfig("transfer-noise").resolved()
        assert cfg.n_qubits == 7
        assert cfg.n_runs == 200
        assert cfg.engine == "trajectories"
        assert cfg.relaxation_rate == 0.0
        assert cfg.dephasing_rate == 0.0

    def test_resolved_ghz_noise_defaults(self):
        cfg = ExperimentConfig("ghz").resolved()
        assert cfg.relaxation_rate == 0.2
        assert cfg.dephasing_rate == 0.5
        assert cfg.engine == "trajectories"

    def test_resolved_gamma_cut_defaults(self):
        cfg = ExperimentConfig("sweep-gamma-cut").resolved()
        assert cfg.n_runs == 1000
        assert cfg.n_runs_trajectories == 12000
        assert cfg.dephasing_rate == 0.2

    def test_resolved_grids(self):
        coll = ExperimentConfig("collective-scan").resolved()
        assert coll.gamma_grid == (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
        sweep = ExperimentConfig("sweep-2d").resolved()
        assert len(sweep.gamma_grid) == 11
        assert sweep.gamma_grid[0] == 0.0 and sweep.gamma_grid[-1] == 1.0
        assert len(sweep.relaxation_grid) == 11

    def test_explicit_values_survive_resolution(self):
        cfg = ExperimentConfig(
            "transfer-disorder", n_qubits=4, n_runs=7, engine="trajectories"
        ).resolved()
        assert (cfg.n_qubits, cfg.n_runs, cfg.engine) == (4, 7, "trajectories")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_qubits": 0},
            {"delta": -0.1},
            {"delta": 1.5},
            {"relaxation_rate": -1.0},
            {"nbar": -0.5},
            {"n_runs": 0},
            {"n_runs_trajectories": 0},
            {"n_steps": 3},
            {"n_steps": 0},
            {"grid_points": 1},
            {"t_max": 0.0},
            {"engine": "exact"},
            {"workers": 0},
            {"master_seed": 2**64},
            {"master_seed": -1},
        ],
    )
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            ExperimentConfig("transfer-ideal", **kwargs).resolved()

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            ExperimentConfig("teleportation").resolved()

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ConfigError, match="n_qubit"):
            ExperimentConfig.from_dict({"experiment": "ghz", "n_qubit": 3})

    def test_from_dict_requires_experiment(self):
        with pytest.raises(ConfigError, match="experiment"):
            ExperimentConfig.from_dict({"n_qubits": 3})

    def test_from_dict_coerces_grids(self):
        cfg = ExperimentConfig.from_dict(
            {"experiment": "sweep-2d", "gamma_grid": [0, 1], "relaxation_grid": [0.5]}
        )
        assert cfg.gamma_grid == (0.0, 1.0)
        assert cfg.relaxation_grid == (0.5,)

    def test_dict_round_trip(self):
        cfg = ExperimentConfig("collective-scan", n_runs=5).resolved()
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_digest_ignores_out_dir_and_workers(self):
        a = ExperimentConfig("ghz", out_dir="x", workers=1).resolved()
        b = ExperimentConfig("ghz", out_dir="y", workers=8).resolved()
        assert a.digest() == b.digest()

    def test_digest_tracks_computed_values(self):
        a = ExperimentConfig("ghz", n_runs=10).resolved()
        b = ExperimentConfig("ghz", n_runs=11).resolved()
        assert a.digest() != b.digest()


class TestArtifacts:
    def test_write_csv_round_trips_floats(self, tmp_path):
        path = tmp_path / "t.csv"
        rows = [(0.1, 1 / 3), (np.pi, 1e-17)]
        write_csv(path, ["a", "b"], rows)
        text = path.read_text().splitlines()
        assert text[0] == "a,b"
        back = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.array_equal(back, np.array(rows))

    def test_run_store_round_trip(self, tmp_path):
        store = RunStore(tmp_path)
        store.put("run0", [1.0, 0.5, 0.25])
        assert np.array_equal(store.get("run0"), [1.0, 0.5, 0.25])

    def test_run_store_missing_is_none(self, tmp_path):
        assert RunStore(tmp_path).get("nope") is None

    def test_run_store_corrupt_is_none(self, tmp_path):
        store = RunStore(tmp_path)
        store.path("bad").write_text("{not json")
        assert store.get("bad") is None

    def test_run_store_clear(self, tmp_path):
        store = RunStore(tmp_path)
        store.put("a", [1.0])
        store.put("b", [2.0])
        store.clear()
        assert store.get("a") is None and store.get("b") is None


class TestPayloads:
    def base_payload(self, n=2, delta=0.0):
        pattern = perfect_transfer_pattern(ChainSpec(n))
        return {
            "j": pattern.j.tolist(),
            "b": pattern.b.tolist(),
            "delta": delta,
            "entropy": 99,
            "alpha": (float(np.real(DEFAULT_INPUT[0])), float(np.imag(DEFAULT_INPUT[0]))),
            "beta": (float(np.real(DEFAULT_INPUT[1])), float(np.imag(DEFAULT_INPUT[1]))),
        }

    def test_seed_child_matches_spawn(self):
        parent = np.random.SeedSequence(99)
        spawned = parent.spawn(4)[3]
        direct = _seed_child(99, 3)
        assert direct.spawn_key == spawned.spawn_key
        assert np.array_equal(
            direct.generate_state(4), spawned.generate_state(4)
        )

    def test_unknown_kind_raises(self):
        with pytest.raises(ValueError, match="payload kind"):
            run_payload({"kind": "mystery", "entropy": 0})

    def test_disorder_curve_without_disorder_is_ideal(self):
        times = default_times(11, np.pi / 2)
        payload = dict(
            self.base_payload(), kind="disorder_curve", run=0, times=times.tolist()
        )
        got = np.asarray(run_payload(payload))
        pattern = perfect_transfer_pattern(ChainSpec(2))
        want = ideal_transfer_curve(pattern, *DEFAULT_INPUT, times=times).fidelities
        assert np.allclose(got, want, atol=1e-12)

    def test_disorder_curve_reproducible(self):
        times = [QUARTER]
        payload = dict(
            self.base_payload(delta=0.1), kind="disorder_curve", run=2, times=times
        )
        assert run_payload(payload) == run_payload(payload)

    def test_haar_input_reproducible_and_distinct(self):
        times = [0.3]
        fixed = dict(
            self.base_payload(), kind="disorder_curve", run=0, times=times
        )
        haar = dict(fixed, input="haar")
        assert run_payload(haar) == run_payload(haar)
        assert run_payload(haar) != run_payload(fixed)

    def test_noisy_curve_zero_noise_tracks_ghz_ideal(self):
        from spinflux.noise import NoiseConfig

        plan = EvolutionPlan(np.pi / 2, 16)
        payload = dict(
            self.base_payload(),
            kind="noisy_curve",
            run=0,
            engine="deterministic",
            noise=NoiseConfig().to_json(),
            t_max=plan.total_time,
            n_steps=plan.n_steps,
            protocol="ghz",
        )
        got = np.asarray(run_payload(payload))
        pattern = perfect_transfer_pattern(ChainSpec(2))
        want = ideal_ghz_curve(pattern, times=plan.step_times()).fidelities
        assert np.allclose(got, want, atol=1e-9)

    @pytest.mark.parametrize("engine", ["deterministic", "trajectories"])
    def test_noise_point_zero_noise_is_perfect(self, engine):
        from spinflux.noise import NoiseConfig

        payload = dict(
            self.base_payload(),
            kind="noise_point",
            engine=engine,
            noise=NoiseConfig().to_json(),
            t_max=QUARTER,
            n_steps=8,
            runs=2,
        )
        finals = np.asarray(run_payload(payload))
        assert finals.shape == (2,)
        assert np.allclose(finals, 1.0, atol=1e-9)


class TestComputeKeyed:
    def tasks(self, n_tasks=3):
        pattern = perfect_transfer_pattern(ChainSpec(2))
        base = {
            "j": pattern.j.tolist(),
            "b": pattern.b.tolist(),
            "delta": 0.1,
            "entropy": 5,
            "alpha": (1.0, 0.0),
            "beta": (0.0, 0.0),
        }
        return [
            (
                f"run{k}",
                dict(base, kind="disorder_curve", run=k, times=[0.2, QUARTER]),
            )
            for k in range(n_tasks)
        ]

    def test_serial_and_parallel_agree_exactly(self):
        tasks = self.tasks()
        serial = compute_keyed(tasks, workers=1, store=None)
        parallel = compute_keyed(tasks, workers=3, store=None)
        for key, _ in tasks:
            assert np.array_equal(serial[key], parallel[key])

    def test_cached_partials_short_circuit(self, tmp_path):
        tasks = self.tasks(2)
        store = RunStore(tmp_path)
        store.put(tasks[0][0], [42.0, 43.0])
        results = compute_keyed(tasks, workers=1, store=store)
        assert np.array_equal(results[tasks[0][0]], [42.0, 43.0])
        # the fresh task must have been computed and persisted
        assert store.get(tasks[1][0]) is not None


class TestHelpers:
    def test_fibonacci_sphere_unit_norms(self):
        pts = _fibonacci_sphere(50)
        assert pts.shape == (50, 3)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_interior_peak_found(self):
        means = np.array([0.2, 0.5, 0.2])
        errs = np.full(3, 0.01)
        assert _interior_peak(means, errs) == 1

    def test_interior_peak_rejects_noise_level_bumps(self):
        means = np.array([0.2, 0.21, 0.2])
        errs = np.full(3, 0.05)
        assert _interior_peak(means, errs) is None

    def test_interior_peak_monotone_is_none(self):
        means = np.linspace(1.0, 0.5, 6)
        errs = np.full(6, 1e-4)
        assert _interior_peak(means, errs) is None


class TestRunExperiment:
    def test_flux_demo_artifacts_and_summary(self, tmp_path):
        cfg = ExperimentConfig("flux-demo", grid_points=41, out_dir=str(tmp_path / "f"))
        res = run_experiment(cfg)
        s = res.summary
        assert s["analytic_max_err"] <= 1e-9
        assert s["uniform3_xx_max_imag"] <= 1e-12
        assert s["equivalence_residual"] <= 1e-8
        assert s["doubled_same_letter_max"] <= 1e-9
        assert abs(abs(s["native_xy_at_quarter"]) - 1.0) <= 1e-9
        out = res.out_dir
        for name in ("flux-demo.csv", "summary.txt", "manifest.json", "config.digest"):
            assert (out / name).exists()

    def test_manifest_layout_and_digests(self, tmp_path):
        cfg = ExperimentConfig("flux-demo", grid_points=21, out_dir=str(tmp_path / "f"))
        res = run_experiment(cfg)
        manifest = json.loads(res.manifest_path.read_text())
        assert manifest["experiment"] == "flux-demo"
        assert manifest["config"]["grid_points"] == 21
        assert manifest["config_digest"] == cfg.resolved().digest()
        assert manifest["rng"]["master_seed"] == 12345
        assert "spawn_key=(k,)" in manifest["rng"]["per_run_seeds"]
        assert "spinflux" in manifest["software_version"]
        assert manifest["wallclock_seconds"] > 0
        for name, digest in manifest["outputs"].items():
            data = (res.out_dir / name).read_bytes()
            assert hashlib.sha256(data).hexdigest() == digest

    def test_transfer_ideal_peak_at_quarter(self, tmp_path):
        cfg = ExperimentConfig(
            "transfer-ideal", n_qubits=4, grid_points=81, out_dir=str(tmp_path / "t")
        )
        res = run_experiment(cfg)
        assert abs(res.summary["peak_fidelity"] - 1.0) <= 1e-9
        assert res.summary["peak_at_quarter"]
        assert abs(res.summary["fidelity_at_quarter"] - 1.0) <= 1e-9

    def test_transfer_disorder_summary_and_threshold(self, tmp_path):
        cfg = small_config(
            "transfer-disorder", n_runs=3, out_dir=str(tmp_path / "d")
        )
        res = run_experiment(cfg)
        s = res.summary
        assert s["n_runs"] == 3
        assert len(s["threshold"]) == 7
        deltas = [row["delta"] for row in s["threshold"]]
        assert deltas == [round(0.05 * i, 10) for i in range(1, 8)]
        assert isinstance(s["classical_threshold_ok"], bool)
        assert (res.out_dir / "transfer-disorder.csv").exists()
        assert (res.out_dir / "threshold.csv").exists()

    def test_transfer_noise_variants(self, tmp_path):
        cfg = small_config(
            "transfer-noise", engine="deterministic", out_dir=str(tmp_path / "n")
        )
        res = run_experiment(cfg)
        variants = res.summary["variants"]
        assert set(variants) == set(NOISE_VARIANTS)
        for label, info in variants.items():
            assert info["relaxation_rate"] == NOISE_VARIANTS[label][0]
            assert info["dephasing_rate"] == NOISE_VARIANTS[label][1]
            assert 0.0 <= info["peak_fidelity"] <= 1.0
        header = (res.out_dir / "transfer-noise.csv").read_text().splitlines()[0]
        assert header == "Jt,mean_caption,stderr_caption,mean_text,stderr_text"

    def test_sweep_2d_best_point_is_noiseless(self, tmp_path):
        cfg = small_config(
            "sweep-2d",
            engine="deterministic",
            delta=0.0,
            gamma_grid=(0.0, 1.0),
            relaxation_grid=(0.0, 1.0),
            out_dir=str(tmp_path / "s"),
        )
        res = run_experiment(cfg)
        best, worst = res.summary["best"], res.summary["worst"]
        assert best["gamma"] == 0.0 and best["Gamma"] == 0.0
        assert abs(best["mean"] - 1.0) <= 1e-9
        assert worst["mean"] < best["mean"]
        rows = (res.out_dir / "sweep-2d.csv").read_text().splitlines()
        assert rows[0] == "gamma,Gamma,mean_fidelity,stderr"
        assert len(rows) == 1 + 4

    def test_sweep_gamma_cut_runs_both_engines(self, tmp_path):
        cfg = small_config(
            "sweep-gamma-cut",
            n_runs_trajectories=3,
            delta=0.0,
            dephasing_rate=0.0,
            relaxation_grid=(0.0, 0.5),
            out_dir=str(tmp_path / "g"),
        )
        res = run_experiment(cfg)
        engines = res.summary["engines"]
        assert engines["deterministic"]["n_runs"] == 2
        assert engines["trajectories"]["n_runs"] == 3
        for info in engines.values():
            assert abs(info["means"][0] - 1.0) <= 1e-9  # noiseless grid point
            assert "resonance_peak_index" in info
        rows = (res.out_dir / "sweep-gamma-cut.csv").read_text().splitlines()
        assert rows[0] == (
            "Gamma,mean_deterministic,stderr_deterministic,"
            "mean_trajectories,stderr_trajectories"
        )
        assert len(rows) == 1 + 2

    def test_collective_scan_degrades_with_gamma(self, tmp_path):
        cfg = small_config(
            "collective-scan",
            gamma_grid=(0.0, 0.4),
            engine="deterministic",
            out_dir=str(tmp_path / "c"),
        )
        res = run_experiment(cfg)
        means = res.summary["means"]
        assert len(means) == 2
        assert means[0] > means[1]
        assert isinstance(res.summary["strictly_decreasing"], bool)

    def test_ghz_summary(self, tmp_path):
        cfg = small_config("ghz", out_dir=str(tmp_path / "z"))
        res = run_experiment(cfg)
        s = res.summary
        assert abs(s["ideal_peak"] - 1.0) <= 1e-9
        assert abs(s["ideal_peak_time"] - QUARTER) <= 1e-9
        assert 0.0 <= s["noisy_at_quarter"] <= 1.0
        header = (res.out_dir / "ghz.csv").read_text().splitlines()[0]
        assert header == "Jt,ideal,mean_noisy,stderr_noisy"

    def test_qpt_report_artifacts(self, tmp_path):
        cfg = small_config("qpt-report", n_runs=3, out_dir=str(tmp_path / "q"))
        res = run_experiment(cfg)
        s = res.summary
        assert abs(s["ideal"]["process_fidelity"] - 1.0) <= 1e-9
        assert s["ideal"]["max_offdiagonal"] <= 1e-9
        assert 0 <= s["worst_of_ensemble"]["run"] < 3
        assert s["worst_of_ensemble"]["average_state_fidelity"] <= (
            s["ensemble_mean_avg_fidelity"] + 1e-12
        )
        assert s["bloch"]["max_output_norm"] <= 1.0 + 1e-9
        assert set(s["noise_variants"]) == set(NOISE_VARIANTS)
        for name in ("ideal", "disordered", "worst", "noise_caption", "noise_text"):
            path = res.out_dir / f"chi_{name}.json"
            assert path.exists()
            chi = ProcessMatrix.from_json(path.read_text())
            assert chi.entries.shape == (4, 4)
        assert (res.out_dir / "qpt-report.csv").exists()

    def test_fresh_run_clears_stale_partials(self, tmp_path):
        out = tmp_path / "d"
        stale = out / "partials" / "stale.json"
        stale.parent.mkdir(parents=True)
        stale.write_text("[1.0]")
        cfg = small_config("transfer-disorder", out_dir=str(out))
        run_experiment(cfg)
        assert not stale.exists()

    def test_resume_reuses_partials_byte_identically(self, tmp_path):
        out = tmp_path / "d"
        cfg = small_config("transfer-disorder", n_runs=3, out_dir=str(out))
        run_experiment(cfg)
        first = (out / "transfer-disorder.csv").read_bytes()
        # corrupt one partial; resume must recompute just that run and
        # still reproduce the same bytes
        victim = next((out / "partials").glob("curve_run*.json"))
        victim.write_text("not json")
        run_experiment(cfg, resume=True)
        assert (out / "transfer-disorder.csv").read_bytes() == first

    def test_resume_with_changed_config_rejected(self, tmp_path):
        out = tmp_path / "d"
        run_experiment(small_config("transfer-disorder", out_dir=str(out)))
        changed = small_config("transfer-disorder", n_runs=5, out_dir=str(out))
        with pytest.raises(ConfigError, match="digest"):
            run_experiment(changed, resume=True)


class TestReport:
    def manifest(self, tmp_path, name, experiment, summary):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps({"experiment": experiment, "summary": summary}))
        return path

    def test_bands_pass_and_fail(self, tmp_path):
        good = self.manifest(
            tmp_path, "good", "flux-demo", {"analytic_max_err": 5e-10}
        )
        bad = self.manifest(
            tmp_path, "bad", "flux-demo", {"analytic_max_err": 1e-6}
        )
        report = emit_report([good, bad])
        lines = report.splitlines()
        assert lines[0].startswith("experiment")
        assert lines[1].endswith("pass")
        assert lines[2].endswith("FAIL")

    def test_info_rows_have_no_band(self, tmp_path):
        path = self.manifest(
            tmp_path, "s", "sweep-2d", {"best": {"mean": 0.9, "gamma": 0, "Gamma": 0}}
        )
        assert emit_report([path]).splitlines()[1].endswith("info")

    def test_ghz_band(self, tmp_path):
        ok = self.manifest(tmp_path, "a", "ghz", {"noisy_peak": 0.88})
        low = self.manifest(tmp_path, "b", "ghz", {"noisy_peak": 0.52})
        lines = emit_report([ok, low]).splitlines()
        assert lines[1].endswith("pass")
        assert lines[2].endswith("FAIL")

    def test_empty_report_is_header_only(self):
        report = emit_report([])
        assert report.splitlines() == ["experiment  result  target  ok"]

    def test_missing_manifest_raises(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            emit_report([tmp_path / "none.json"])

    def test_corrupt_manifest_raises(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{oops")
        with pytest.raises(ConfigError, match="corrupt"):
            emit_report([path])


class TestCli:
    def test_parser_knows_every_experiment(self):
        parser = build_parser()
        for exp in EXPERIMENTS:
            args = parser.parse_args([exp])
            assert args.command == exp
        assert parser.parse_args(["report"]).command == "report"

    def test_run_and_report(self, tmp_path, capsys):
        out = tmp_path / "f"
        code = main(["flux-demo", "--out", str(out), "--grid-points", "21"])
        assert code == 0
        printed = capsys.readouterr().out
        assert str(out / "manifest.json") in printed
        assert "uniform 3-site" in printed

        code = main(["report", str(out / "manifest.json")])
        assert code == 0
        report = capsys.readouterr().out
        assert "flux-demo" in report
        assert report.rstrip().endswith("pass")

    def test_flags_override_config_file(self, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"n_qubits": 2, "grid_points": 41}))
        out = tmp_path / "f"
        code = main(
            [
                "flux-demo",
                "--config",
                str(conf),
                "--qubits",
                "3",
                "--grid-points",
                "21",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        capsys.readouterr()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["n_qubits"] == 3
        assert manifest["config"]["grid_points"] == 21

    def test_config_file_for_other_experiment_rejected(self, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"experiment": "transfer-ideal"}))
        assert main(["flux-demo", "--config", str(conf)]) == 2
        assert "transfer-ideal" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["flux-demo", "--config", "no-such.json"]) == 2
        assert "not found" in capsys.readouterr().err

    def test_config_file_must_be_object(self, tmp_path, capsys):
        conf = tmp_path / "conf.json"
        conf.write_text("[1, 2]")
        assert main(["flux-demo", "--config", str(conf)]) == 2
        capsys.readouterr()

    def test_invalid_parameter_exits_2(self, tmp_path, capsys):
        code = main(
            ["transfer-ideal", "--steps", "3", "--out", str(tmp_path / "x")]
        )
        assert code == 2
        assert "n_steps" in capsys.readouterr().err

    def test_unknown_command_exits_2(self, capsys):
        assert main(["unknown-thing"]) == 2
        capsys.readouterr()

    def test_no_command_exits_2(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_report_missing_manifest_exits_2(self, capsys):
        assert main(["report", "absent.json"]) == 2
        capsys.readouterr()

    def test_report_without_manifests_prints_header(self, capsys):
        assert main(["report"]) == 0
        assert capsys.readouterr().out.startswith("experiment")

    def test_resume_flag_reuses_out_dir(self, tmp_path, capsys):
        out = tmp_path / "d"
        args = [
            "transfer-disorder",
            "--qubits",
            "2",
            "--runs",
            "2",
            "--grid-points",
            "11",
            "--out",
            str(out),
        ]
        assert main(args) == 0
        first = (out / "transfer-disorder.csv").read_bytes()
        assert main(args + ["--resume"]) == 0
        assert (out / "transfer-disorder.csv").read_bytes() == first
        capsys.readouterr()

    def test_resume_with_directory_argument(self, tmp_path, capsys):
        out = tmp_path / "d"
        base = ["transfer-disorder", "--qubits", "2", "--runs", "2",
                "--grid-points", "11"]
        assert main(base + ["--out", str(out)]) == 0
        assert main(base + ["--resume", str(out)]) == 0
        capsys.readouterr()

    def test_console_script_installed(self):
        exe = shutil.which("spinflux")
        assert exe is not None
        proc = subprocess.run(
            [exe, "report"], capture_output=True, text=True, timeout=120
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("experiment")
