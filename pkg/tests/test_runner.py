import numpy as np
import pytest
import sympy as sp
import yaml

from hermwave.cli import main
from hermwave.diagnostics import ErrorReport, l2_error, linf_error
from hermwave.field import project
from hermwave.runner import (
    ConfigError,
    config_from_dict,
    cross_section_points,
    parse_config,
    read_cross_section,
    read_energy_csv,
    read_errors_csv,
    read_manifest,
    read_snapshot,
    run,
    run_convergence,
    run_wavefield,
    write_cross_section,
    write_energy_csv,
    write_errors_csv,
    write_manifest,
    write_snapshot,
)
from hermwave.scenarios import (
    CATALOG,
    get_scenario,
    layered,
    make_basis,
    real_power,
    ricker,
)


def write_yaml(path, data):
    path.write_text(yaml.safe_dump(data))
    return path


class TestConfig:
    def test_scenario_defaults(self):
        cfg = config_from_dict({"scenario": "ex4"})
        assert cfg.scenario == "EX4"
        assert cfg.basis["center"] == [10.0, 10.0]
        assert cfg.N_list == [100, 200] and cfg.T_final == 0.5

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="'N_lsit'"):
            config_from_dict({"scenario": "EX1_I", "N_lsit": [10]})

    def test_negative_dt_named(self):
        with pytest.raises(ConfigError, match="'dt'"):
            config_from_dict({"scenario": "EX1_I", "dt": -1e-4})

    def test_wrong_type_named(self):
        with pytest.raises(ConfigError, match="'T_final'.*number"):
            config_from_dict({"scenario": "EX1_I", "T_final": "one"})
        with pytest.raises(ConfigError, match="'threads'"):
            config_from_dict({"scenario": "EX1_I", "threads": True})

    @pytest.mark.parametrize("raw, key", [
        ({"scenario": "EX1_I", "N_list": [20, 10]}, "N_list"),
        ({"scenario": "EX9"}, "scenario"),
        ({}, "scenario"),
        ({"scenario": "EX1_I", "problem": {"u0": "x"}}, "either"),
        ({"scenario": "EX1_I", "basis": {"centre": 1.0}}, "basis.centre"),
        ({"scenario": "EX1_I", "basis": {"scale": 0}}, "basis.scale"),
        ({"scenario": "EX1_I", "snapshots": [2.0]}, "snapshots"),
        ({"scenario": "EX4", "cross_sections": [{"line": "x"}]}, "cross_sections"),
        ({"scenario": "EX3", "reference_N": 64}, "reference_N"),
        ({"scenario": "EX1_I", "outputs": ["plots"]}, "outputs"),
        ({"problem": {"u0": "x", "colour": 1}}, "problem.colour"),
    ])
    def test_rejections(self, raw, key):
        with pytest.raises(ConfigError, match=key):
            config_from_dict(raw)

    def test_not_a_mapping(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            parse_config(p)

    def test_overrides(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", {"scenario": "EX4"})
        cfg = parse_config(p, ["basis.center=[12, 11]", "N_list=[20]", "dt=2e-4", "params.f0=10"])
        assert cfg.basis["center"] == [12, 11] and cfg.basis["scale"] == 1.0
        assert cfg.N_list == [20] and cfg.dt == 2e-4 and cfg.params["f0"] == 10
        with pytest.raises(ConfigError):
            parse_config(p, ["N_list"])


class TestFileFormats:
    def test_errors_round_trip(self, tmp_path):
        rows = [ErrorReport(10, 1.234e-4, 5.6e-5, 0.1), ErrorReport(20, 1e-7, 3.3e-8, 0.01, 10.3, 10.7, 3.3)]
        write_errors_csv(tmp_path / "e.csv", rows, with_h1=True)
        back = read_errors_csv(tmp_path / "e.csv")
        assert back == rows
        write_errors_csv(tmp_path / "f.csv", rows)
        assert read_errors_csv(tmp_path / "f.csv")[1].h1_error is None

    def test_energy_round_trip(self, tmp_path):
        t, e = [0.0, 0.1, 0.2], [1.0, 0.9, 0.81]
        write_energy_csv(tmp_path / "en.csv", t, e)
        tb, eb = read_energy_csv(tmp_path / "en.csv")
        assert list(tb) == t and list(eb) == e

    def test_snapshot_round_trip(self, tmp_path):
        vals = np.random.default_rng(0).standard_normal((5, 3))
        write_snapshot(tmp_path / "s.txt", vals, (0.0, 20.0, 0.0, 10.0), 0.3)
        back, window, t = read_snapshot(tmp_path / "s.txt")
        np.testing.assert_array_equal(back, vals)
        assert window == (0.0, 20.0, 0.0, 10.0) and t == 0.3
        # rows of the file are y
        assert len((tmp_path / "s.txt").read_text().splitlines()) == 4 + 3

    def test_cross_section_round_trip(self, tmp_path):
        cols = tuple(np.linspace(0, 1, 7) * k for k in (1, 2, 3, 4))
        write_cross_section(tmp_path / "x.csv", *cols)
        for a, b in zip(read_cross_section(tmp_path / "x.csv"), cols):
            np.testing.assert_array_equal(a, b)

    def test_manifest_round_trip(self, tmp_path):
        entries = {"scenario": "EX4", "basis": "{'center': [10.0, 10.0]}", "note": "a = b"}
        write_manifest(tmp_path / "m.txt", entries)
        assert read_manifest(tmp_path / "m.txt") == entries

    def test_cross_section_points(self):
        s, x, y = cross_section_points({"line": "diagonal"}, (0, 20, 0, 20), 5)
        np.testing.assert_allclose(x, y)
        assert s[-1] == pytest.approx(20 * np.sqrt(2))
        s, x, y = cross_section_points({"line": "x", "value": 17}, (0, 30, 0, 30), 4)
        assert np.all(x == 17.0) and y[-1] == 30.0


class TestScenarioHelpers:
    def test_ricker(self):
        h = ricker(15.0, 0.05)
        assert h(0.05) == 1.0
        a = (np.pi * 15 * 0.01) ** 2
        assert h(0.06) == pytest.approx((1 - 2 * a) * np.exp(-a), rel=1e-15)

    def test_real_power(self):
        x = np.array([-8.0, -1.0, 0.0, 8.0])
        np.testing.assert_allclose(real_power(x, 1 / 3), [-2.0, -1.0, 0.0, 2.0], atol=1e-15)
        np.testing.assert_allclose(real_power(x, 4 / 3), [16.0, 1.0, 0.0, 16.0], atol=1e-12)
        np.testing.assert_allclose(real_power(x, 0.5), [-np.sqrt(8), -1, 0, np.sqrt(8)])

    def test_layered_interface_belongs_below(self):
        c = layered(1.0, 2.5, 16.5)
        np.testing.assert_array_equal(c(np.array([16.0, 16.5, 16.6])), [1.0, 1.0, 2.5])

    def test_catalog_lookup(self):
        assert get_scenario("ex2_ii").id == "EX2_II"
        with pytest.raises(KeyError, match="EX1_I"):
            get_scenario("nope")

    def test_make_basis(self):
        b = make_basis(2, 5, [10, 12], 1.0)
        assert b[0].center == 10 and b[1].center == 12 and b[1].degree == 5


@pytest.mark.parametrize("sid", ["EX1_I", "EX1_II", "EX2_I", "EX2_II"])
def test_catalog_self_audit(sid):
    """The exact solutions satisfy the PDE with the catalog source and data."""
    sc = CATALOG[sid]
    x, y, t = sp.symbols("x y t", real=True)
    coords = (x,) if sc.dims == 1 else (x, y)
    r2 = sum(c**2 for c in coords)
    u = sp.exp(-r2 - t) if sid.endswith("_I") else sp.exp(-r2) * sp.sin(t)
    lap = sum(sp.diff(u, c, 2) for c in coords)
    # alpha = beta = gamma = 1
    f_exact = sp.diff(u, t, 2) + sp.diff(u, t) - sp.diff(lap, t) - lap
    f_num = sp.lambdify((*coords, t), f_exact, "numpy")
    u_num = sp.lambdify((*coords, t), u, "numpy")
    ut_num = sp.lambdify((*coords, t), sp.diff(u, t), "numpy")

    basis = make_basis(sc.dims, 4, 0.0, 1.0)
    problem = sc.build(basis, 1e-4, 1.0, 2, {})
    rng = np.random.default_rng(7)
    pts = rng.uniform(-3, 3, (sc.dims, 100))
    ts = rng.uniform(0, 1, 100)

    np.testing.assert_allclose(sc.exact(*pts, ts), u_num(*pts, ts), atol=1e-14)
    if problem.source is None:
        np.testing.assert_allclose(f_num(*pts, ts), 0.0, atol=1e-8)
    else:
        built = sum(g(*pts) * h(ts) for g, h in problem.source.terms)
        np.testing.assert_allclose(built, f_num(*pts, ts), atol=1e-8)
    u0 = problem.u0(*pts) if problem.u0 is not None else 0.0
    w0 = problem.w0(*pts) if problem.w0 is not None else 0.0
    np.testing.assert_allclose(u0, u_num(*pts, 0.0), atol=1e-14)
    np.testing.assert_allclose(w0, ut_num(*pts, 0.0), atol=1e-14)
    for k, g in enumerate(sc.exact_grad):
        dg = sp.lambdify((*coords, t), sp.diff(u, coords[k]), "numpy")
        np.testing.assert_allclose(g(*pts, ts), dg(*pts, ts), atol=1e-14)


class TestRuns:
    def test_zero_time_error_is_projection_error(self, tmp_path):
        cfg = config_from_dict({"scenario": "EX1_I", "N_list": [10, 20], "T_final": 0.0, "out_dir": str(tmp_path)})
        reps = run_convergence(cfg)
        for rep in reps:
            spec = make_basis(1, rep.N, 0.0, 1.0)
            proj = project(spec, lambda x: np.exp(-x**2))
            assert rep.l2_error == pytest.approx(l2_error(proj, lambda x: np.exp(-x**2)), rel=1e-12)
            assert rep.linf_error == pytest.approx(linf_error(proj, lambda x: np.exp(-x**2)), rel=1e-12)

    def test_reproducible_and_threads(self, tmp_path):
        base = {"scenario": "EX1_II", "N_list": [8, 12, 16], "T_final": 0.05, "dt": 1e-3}
        a = run_convergence(config_from_dict({**base, "out_dir": str(tmp_path / "a")}))
        b = run_convergence(config_from_dict({**base, "out_dir": str(tmp_path / "b"), "threads": 3}))
        assert a == b
        assert (tmp_path / "a" / "errors.csv").read_bytes() == (tmp_path / "b" / "errors.csv").read_bytes()
        assert read_errors_csv(tmp_path / "a" / "errors.csv") == a
        man = read_manifest(tmp_path / "b" / "manifest.txt")
        assert man["scenario"] == "EX1_II" and man["workers"] == "3" and man["dt"] == "0.001"

    def test_reference_protocol(self, tmp_path):
        cfg = config_from_dict({"scenario": "EX3", "N_list": [8, 16], "reference_N": 32, "T_final": 0.02,
                                "dt": 1e-3, "out_dir": str(tmp_path)})
        reps = run_convergence(cfg)
        assert (tmp_path / "reference_N32.txt").is_file()
        assert all(r.h1_error is not None and r.h1_error >= r.l2_error for r in reps)
        assert reps[1].l2_error < reps[0].l2_error
        assert read_manifest(tmp_path / "manifest.txt")["reference_N"] == "32"

    def test_override_recorded_in_manifest(self, tmp_path):
        p = write_yaml(tmp_path / "c.yaml", {"scenario": "EX4", "N_list": [12], "T_final": 0.002,
                                             "snapshots": [0.002], "grid_points": 11})
        cfg = parse_config(p, [f"out_dir={tmp_path / 'o'}", "basis.center=[9.5, 10.5]"])
        run_wavefield(cfg)
        man = read_manifest(tmp_path / "o" / "manifest.txt")
        assert "[9.5, 10.5]" in man["basis"]

    def test_wavefield_outputs(self, tmp_path):
        cfg = config_from_dict({"scenario": "EX4", "N_list": [16], "T_final": 0.01, "snapshots": [0.004, 0.01],
                                "grid_points": 21, "energy_every": 2, "out_dir": str(tmp_path)})
        res = run_wavefield(cfg)[16]
        d = tmp_path / "N16"
        vals, window, t = read_snapshot(d / "snap_t0.004.txt")
        np.testing.assert_array_equal(vals, res.snapshots[0.004])
        assert window == (0.0, 20.0, 0.0, 20.0) and t == 0.004
        *_, u = read_cross_section(d / "xsec_diag_t0.01.csv")
        np.testing.assert_array_equal(u, res.cross_sections[("diag", 0.01)][3])
        te, en = read_energy_csv(d / "energy.csv")
        assert te[0] == 0.0 and te[-1] == 0.01
        assert len(en) == len(te)
        np.testing.assert_allclose(np.diff(te), 2e-4, rtol=1e-9)

    def test_wavefield_needs_2d(self, tmp_path):
        with pytest.raises(ConfigError):
            run_wavefield(config_from_dict({"scenario": "EX1_I", "out_dir": str(tmp_path)}))

    def test_inline_problem(self, tmp_path):
        cfg = config_from_dict({
            "problem": {"u0": "exp(-x**2)", "w0": "-exp(-x**2)", "exact": "exp(-x**2 - t)"},
            "N_list": [10, 20], "T_final": 0.1, "dt": 1e-3, "out_dir": str(tmp_path)})
        reps = run(cfg)
        assert reps[1].l2_error < reps[0].l2_error < 1e-3
        ref = run_convergence(config_from_dict({"scenario": "EX1_I", "N_list": [10, 20], "T_final": 0.1,
                                                "dt": 1e-3, "out_dir": str(tmp_path / "ref")}))
        assert reps[1].l2_error == pytest.approx(ref[1].l2_error, rel=1e-10)

    def test_inline_expressions_are_sandboxed(self, tmp_path):
        cfg = config_from_dict({"problem": {"u0": "__import__('os').getcwd()", "exact": "0*x"},
                                "N_list": [4], "out_dir": str(tmp_path)})
        with pytest.raises(NameError):
            run(cfg)


class TestCli:
    def test_list_scenarios(self, capsys):
        assert main(["list-scenarios"]) == 0
        out = capsys.readouterr().out
        for sid in CATALOG:
            assert sid in out

    def test_run(self, tmp_path, capsys):
        p = write_yaml(tmp_path / "c.yaml", {"scenario": "EX1_I", "N_list": [10, 15], "T_final": 0.01})
        assert main(["run", str(p), "--out", str(tmp_path / "o"), "--threads", "2", "--override", "dt=1e-3"]) == 0
        assert "N=  15" in capsys.readouterr().out
        rows = read_errors_csv(tmp_path / "o" / "errors.csv")
        assert [r.N for r in rows] == [10, 15]
        assert read_manifest(tmp_path / "o" / "manifest.txt")["dt"] == "0.001"

    def test_bad_config_exit_code(self, tmp_path, capsys):
        p = write_yaml(tmp_path / "c.yaml", {"scenario": "EX1_I", "dt": -1})
        assert main(["run", str(p)]) == 2
        assert "'dt'" in capsys.readouterr().err
        assert main(["run", str(tmp_path / "missing.yaml")]) == 2

    def test_verify_missing_file(self, tmp_path, capsys):
        assert main(["verify", "--tests", str(tmp_path / "none.py")]) != 0
