import json
import warnings

import numpy as np
import pytest

from softlandau.diagnostics import DiagnosticsRecord
from softlandau.grid import make_grid
from softlandau.harness import (ENTROPY_RATE_COEFF, Envelope, Experiment, ReportError,
                                corollary_epsilon_bound, entropy_rates, entropy_tolerance,
                                evaluate, moment_bound, moment_growth_fit, report,
                                run_experiments, temperature, thm1_alpha, thm1_cumulative,
                                thm1_envelope, thm1_growth_slope, thm1_quantity, thm2_tracking)
from softlandau.integrator import SimulationConfig, Trajectory, run


def synthetic(times, lp=None, moments=None, entropy=None):
    """Trajectory whose records carry prescribed series."""
    lp = lp or {}
    moments = moments or {}
    recs = []
    for k, t in enumerate(times):
        recs.append(DiagnosticsRecord(
            t=float(t), mass=1.0, momentum=(0.0, 0.0, 0.0), energy=1.5,
            entropy=float(entropy[k]) if entropy is not None else 0.0, dissipation=0.0,
            moments={float(s): float(v[k]) for s, v in moments.items()},
            lp_norms={float(p): float(v[k]) for p, v in lp.items()}))
    return Trajectory(SimulationConfig(), recs)


def test_alpha():
    assert thm1_alpha(0.5) == pytest.approx(10 / 9)


def test_thm1_constant_integrand():
    t = np.linspace(0, 2, 21)
    traj = synthetic(t, lp={2.5: np.full_like(t, 0.3)})
    assert thm1_quantity(traj, 0.5) == pytest.approx(2 * 0.3 ** (10 / 9), rel=1e-12)
    assert thm1_quantity(synthetic([0.0], lp={2.5: [0.3]}), 0.5) == 0.0


def test_thm1_additive_over_subdivisions():
    t = np.linspace(0, 4, 41)
    y = 1 + np.sin(t) ** 2
    traj = synthetic(t, lp={2.5: y})
    full = thm1_quantity(traj, 0.5)
    first = thm1_quantity(traj.window(0, 2), 0.5)
    second = thm1_quantity(traj.window(2, 4), 0.5)
    assert first + second == pytest.approx(full, rel=1e-12)
    np.testing.assert_allclose(np.diff(thm1_cumulative(traj, 0.5)) >= 0, True)


def test_thm1_errors():
    with pytest.raises(ValueError):
        thm1_quantity(synthetic([]), 0.5)
    with pytest.raises(ValueError, match="L\\^2.5"):
        thm1_quantity(synthetic([0.0, 1.0], lp={2.0: [1.0, 1.0]}), 0.5)


def test_thm1_growth_slope_of_power_law():
    # integrand alpha-th power k (1+t)^(k-1) integrates to (1+T)^k - 1
    k = 1.6
    t = np.linspace(0, 400, 4001)
    y = (k * (1 + t) ** (k - 1)) ** (1 / thm1_alpha(0.5))
    slope = thm1_growth_slope(synthetic(t, lp={2.5: y}), 0.5)
    assert slope == pytest.approx(k, rel=0.01)


def test_envelope_examples():
    env = thm1_envelope(5.0, -1.0, 0.5, 1.0)
    assert env.form == "polynomial"
    assert env.exponent == pytest.approx(1 + 7 / 9)
    env = thm1_envelope(5.0, -2.0, 0.5, 1.0)
    assert env.form == "stretched_exponential"
    assert env.exponent == pytest.approx(2.5 * 12.5 / 1.5)
    assert Envelope("polynomial", 2.0)(1.0) == 4.0
    assert Envelope("stretched_exponential", 0.5)(4.0, C=2.0) == pytest.approx(np.exp(4.0))


def test_envelope_monotone_in_epsilon():
    for gamma in (-1.5, -1.0, -0.5):
        eps = np.linspace(0.01, 0.99, 50)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            ex = [thm1_envelope(1.0, gamma, e, 1.0).exponent for e in eps]
        assert np.all(np.diff(ex) > 0)


def test_envelope_corollary_warning_and_errors():
    assert corollary_epsilon_bound(-1.0) == pytest.approx(1.5)
    assert corollary_epsilon_bound(-1.5) == pytest.approx(1.0)
    assert corollary_epsilon_bound(-1.8) == pytest.approx(0.5)
    with pytest.warns(UserWarning, match="epsilon"):
        thm1_envelope(1.0, -1.8, 0.6, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        thm1_envelope(1.0, -1.8, 0.4, 1.0)
    for args in ((1.0, 0.0, 0.5, 1.0), (1.0, -1.0, 0.0, 1.0), (1.0, -1.0, 1.0, 1.0),
                 (1.0, -1.0, 0.5, 0.0), (-1.0, -1.0, 0.5, 1.0)):
        with pytest.raises(ValueError):
            thm1_envelope(*args)


def test_thm2_rates():
    t = np.linspace(0, 4, 81)
    flat = thm2_tracking(synthetic(t, lp={2.0: np.full_like(t, 0.2)}), 2.0)
    assert abs(flat.rate) <= 1e-3 and flat.bounded and flat.max_norm == pytest.approx(0.04)
    growing = thm2_tracking(synthetic(t, lp={2.0: np.exp(0.15 * t)}), 2.0)
    assert growing.rate == pytest.approx(0.3, rel=1e-6)
    decaying = thm2_tracking(synthetic(t, lp={2.0: 1 + np.exp(-t)}), 2.0)
    assert decaying.raw_rate < 0 and decaying.rate == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        thm2_tracking(synthetic([0.0, 1.0, 1.0], lp={2.0: [1, 1, 1]}), 2.0)
    with pytest.raises(ValueError):
        thm2_tracking(synthetic(t, lp={2.0: np.ones_like(t)}), 1.0)


def test_moment_fit_and_step_check():
    assert moment_bound(4.0, -2.0) == pytest.approx(2 / 3)
    assert moment_bound(4.0, -1.0) == 1.0
    t = np.linspace(0, 10, 101)
    m4 = 3.0 * (1 + t) ** 0.5
    traj = synthetic(t, moments={1.0: np.full_like(t, 1.2), 4.0: m4})
    fit = moment_growth_fit(traj, 4.0, -2.0)
    assert fit.exponent == pytest.approx(0.5, rel=1e-6)
    # allowance 8 M_1^2 dt against dM_4 <= 1.5 dt
    assert fit.step_ok and fit.worst_step_ratio < 1.5 / (8 * 1.44) * 1.01
    steep = synthetic(t, moments={1.0: np.full_like(t, 0.1), 4.0: 1 + t})
    assert not moment_growth_fit(steep, 4.0, -2.0).step_ok
    assert moment_growth_fit(traj, 4.0, -1.0).step_ok is None
    with pytest.raises(ValueError):
        moment_growth_fit(traj, 2.0, -2.0)
    with pytest.raises(ValueError):
        moment_growth_fit(synthetic(t, moments={4.0: m4}), 4.0, -2.0)


def test_entropy_tolerance_scaling():
    coarse, fine = make_grid(16, 5.0), make_grid(32, 5.0)
    assert entropy_tolerance(coarse) == pytest.approx(ENTROPY_RATE_COEFF * 0.625 ** 2)
    assert entropy_tolerance(fine) == pytest.approx(entropy_tolerance(coarse) / 4)
    assert entropy_tolerance(coarse, -2.0, mass=2.0) == pytest.approx(4 * entropy_tolerance(coarse))
    # T^((gamma - 2)/2): T^-2 at gamma = -2, T^-1.5 at gamma = -1
    assert entropy_tolerance(coarse, -2.0, temperature=2.0) == pytest.approx(
        entropy_tolerance(coarse) / 4)
    assert entropy_tolerance(coarse, -1.0, temperature=4.0) == pytest.approx(
        entropy_tolerance(coarse, -1.0) / 8)
    assert entropy_tolerance(coarse, -1.0) > entropy_tolerance(coarse, -1.5) > entropy_tolerance(coarse)
    with pytest.raises(ValueError):
        entropy_tolerance(coarse, mass=0.0)
    t = np.array([0.0, 0.5, 1.5])
    np.testing.assert_allclose(entropy_rates(synthetic(t, entropy=[1.0, 0.5, 0.6])), [-1.0, 0.1])


def test_temperature_of_record():
    rec = synthetic([0.0]).records[0]
    assert temperature(rec) == pytest.approx(1.0)
    rec.mass, rec.momentum, rec.energy = 2.0, (2.0, 0.0, 0.0), 4.0
    # e = m/2 (|u|^2 + 3 T) with u = 1
    assert temperature(rec) == pytest.approx(1.0)


def test_entropy_rise_scales_with_mass_squared(get_tables, quiet):
    # f -> m f is an exact symmetry of the discrete scheme with time scaled by 1/m,
    # so the rise rate near equilibrium grows like m^2, as the tolerance assumes
    tables = get_tables(16, -2.0)
    rise = []
    for m in (1.0, 2.0):
        cfg = SimulationConfig(n=16, T=0.5 / m, cadence=2, dissipation=None,
                               ic={"kind": "maxwellian", "mass": m})
        rise.append(entropy_rates(run(cfg, tables=tables)).max())
    assert rise[0] > 0
    assert rise[1] / rise[0] == pytest.approx(4.0, rel=1e-8)


IDENTITY_ROWS = {"mass conservation", "positivity", "H-theorem", "entropy production",
                 "coercivity"}


@pytest.fixture(scope="module")
def maxwellian_experiment(get_tables):
    cfg = SimulationConfig(n=16, T=0.5, cadence=2, ic={"kind": "maxwellian"})
    traj = run(cfg, tables=get_tables(16, -2.0))
    return Experiment("maxwellian, n=16", cfg, evaluate("maxwellian, n=16", traj))


def test_single_maxwellian_identity_checks_pass(maxwellian_experiment, tmp_path):
    rows = maxwellian_experiment.rows
    statements = {r.statement for r in rows}
    assert IDENTITY_ROWS | {"theorem 1", "theorem 2"} <= statements
    identity = [r for r in rows if r.statement in IDENTITY_ROWS]
    assert all(r.passed for r in identity), [r for r in identity if not r.passed]
    json_path, md_path = report([maxwellian_experiment], tmp_path / "out")
    doc = json.loads(json_path.read_text())
    assert doc["schema_version"] == 1 and doc["passed"] == all(r.passed for r in rows)
    assert len(doc["rows"]) == len(rows) and doc["runs"][0]["config"]["n"] == 16
    assert md_path.read_text().count("\n| ") == len(rows) + 1


def test_empty_report(tmp_path):
    json_path, md_path = report([], tmp_path)
    doc = json.loads(json_path.read_text())
    assert doc["rows"] == [] and doc["runs"] == [] and doc["passed"] is True
    assert "0 runs" in md_path.read_text()


def test_report_io_error(tmp_path, maxwellian_experiment):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ReportError, match="file"):
        report([maxwellian_experiment], blocker / "sub")


def test_experiment_matrix_has_one_row_set_per_run(get_tables):
    tables = {g: get_tables(8, g) for g in (-2.0, -1.0)}
    exps = run_experiments((-2.0, -1.0), ("maxwellian", "bimaxwellian"), n=8, T=0.2,
                           cadence=1, tables=tables)
    assert [e.name for e in exps] == [f"{ic}, gamma={g:g}, n=8" for g in (-2, -1)
                                      for ic in ("maxwellian", "bimaxwellian")]
    for e in exps:
        theorem1 = [r for r in e.rows if r.statement == "theorem 1"]
        assert len(theorem1) == 1
