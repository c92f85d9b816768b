import numpy as np
import pytest

from softlandau.convolution import convolve_a
from softlandau.grid import integrate, make_grid
from softlandau.initial import InitialConditionSpec, initial_condition, shipped
from softlandau.integrator import (ConfigError, NumericalError, SimulationConfig, cfl_dt, run,
                                   step)


@pytest.mark.parametrize("field, value", [
    ("gamma", 0.0), ("gamma", -2.5), ("epsilon", 0.0), ("epsilon", 1.0), ("p", 1.0),
    ("s", 0.0), ("sigma", 0.0), ("sigma", 1.5), ("n", 7), ("n", 6), ("L", 0.0), ("T", -1.0),
    ("cadence", 0), ("dissipation", "exact"), ("limiter", "minmod")])
def test_config_rejects(field, value):
    with pytest.raises(ConfigError):
        SimulationConfig(**{field: value})


def test_config_derived_exponents():
    cfg = SimulationConfig(gamma=-2.0, epsilon=0.5, s=1.0)
    # q = -3 (gamma - s)(2 - eps) / eps
    assert cfg.q == pytest.approx(27.0)
    assert cfg.alpha == pytest.approx(2 * 2.5 / (3 * 1.5))
    assert cfg.p_list == (2.0, 2.5)
    d = cfg.to_dict()
    assert d["q"] == cfg.q and d["ic"] == {"kind": "maxwellian"}
    assert SimulationConfig(ic={"kind": "bump", "radius": 1.0}).ic.kind == "bump"


def test_cfl_step_bound():
    grid = make_grid(8, 4.0)
    abar = np.zeros((6,) + grid.shape)
    abar[:3] = 2.0
    abar[3] = 1.0  # eigenvalues of [[2,1,0],[1,2,0],[0,0,2]] are 1, 2, 3
    assert cfl_dt(abar, grid, sigma=0.6) == pytest.approx(0.6 * 1.0 / (6 * 3.0))
    assert cfl_dt(np.zeros_like(abar), grid, fallback=0.25) == 0.25
    abar[0, 0, 0, 0] = np.nan
    with pytest.raises(NumericalError):
        cfl_dt(abar, grid)


@pytest.mark.parametrize("limiter", ["fct", None])
def test_step_conserves_mass(get_tables, limiter, quiet):
    tables = get_tables(16, -2.0)
    grid = tables.grid
    f = initial_condition(shipped("anisotropic"), grid)
    dt = cfl_dt(convolve_a(f, tables), grid)
    nxt, clipped = step(f, dt, tables, limiter=limiter)
    assert clipped >= 0.0
    assert nxt.min() >= 0.0
    assert abs(integrate(nxt, grid) - clipped - integrate(f, grid)) < 1e-13 * integrate(f, grid)


def test_fct_removes_undershoots(get_tables, quiet):
    tables = get_tables(16, -2.0)
    grid = tables.grid
    f = initial_condition(shipped("anisotropic"), grid)
    f[f < 1e-3 * f.max()] = 0.0
    dt = cfl_dt(convolve_a(f, tables), grid)
    _, plain = step(f, dt, tables, limiter=None)
    _, limited = step(f, dt, tables, limiter="fct")
    assert plain > 1e-8
    assert limited < 1e-6 * plain


def test_fct_inactive_on_smooth_interior(get_tables):
    # the limiter only acts next to nodes that would be drained, here the far tails
    tables = get_tables(16, -1.0)
    grid = tables.grid
    f = grid.maxwellian(temperature=1.2)
    dt = cfl_dt(convolve_a(f, tables), grid)
    a, _ = step(f, dt, tables, limiter=None)
    b, _ = step(f, dt, tables, limiter="fct")
    bulk = f > 1e-4 * f.max()
    np.testing.assert_allclose(a[bulk], b[bulk], rtol=1e-12)


def test_zero_step_is_identity(get_tables):
    tables = get_tables(8, -2.0)
    f = tables.grid.maxwellian()
    out, clipped = step(f, 0.0, tables)
    np.testing.assert_array_equal(out, f)
    assert clipped == 0.0 and out is not f


def test_second_order_in_time(get_tables):
    # halving dt cuts the one-interval error against a fine reference by ~4
    tables = get_tables(8, -1.0)
    grid = tables.grid
    # bounded away from zero so no clipping interferes
    f = initial_condition(shipped("bimaxwellian"), grid) + 0.01
    T = 0.5 * cfl_dt(convolve_a(f, tables), grid)

    def advance(k):
        g = f
        for _ in range(k):
            g, clipped = step(g, T / k, tables, limiter=None)
            assert clipped == 0.0
        return g

    ref = advance(64)
    e1 = np.abs(advance(1) - ref).max()
    e2 = np.abs(advance(2) - ref).max()
    assert 3.0 < e1 / e2 < 5.0


def test_run_records_and_window(get_tables):
    tables = get_tables(8, -2.0)
    cfg = SimulationConfig(n=8, T=0.2, cadence=3, keep_fields=True, dissipation="pairs")
    traj = run(cfg, tables=tables)
    assert traj.records[0].t == 0.0 and traj.records[-1].t == pytest.approx(0.2)
    assert len(traj.records) == len(traj.fields)
    assert len(traj.records) == 1 + len(traj.dts) // 3 + (len(traj.dts) % 3 > 0)
    assert sum(traj.dts) == pytest.approx(0.2)
    assert traj.mass_drift <= 1e-12
    assert traj.final is not None and traj.tables is tables
    assert traj.series("M_4").shape == traj.times.shape
    assert traj.series("Lp_2.5").shape == traj.times.shape
    part = traj.window(0.05, 0.15)
    assert all(0.05 <= r.t <= 0.15 for r in part.records)
    assert len(part.fields) == len(part.records)


def test_run_zero_horizon(get_tables):
    traj = run(SimulationConfig(n=8, T=0.0), tables=get_tables(8, -2.0))
    assert len(traj.records) == 1 and traj.dts == []


def test_run_rejects_mismatched_tables(get_tables):
    with pytest.raises(ConfigError):
        run(SimulationConfig(n=16, T=0.1), tables=get_tables(8, -2.0))
    with pytest.raises(ConfigError):
        run(SimulationConfig(n=8, gamma=-1.0, T=0.1), tables=get_tables(8, -2.0))


def test_run_flags_non_finite_state(get_tables):
    grid = make_grid(8, 5.0)
    f0 = grid.maxwellian()
    f0[3, 3, 3] = np.inf
    with pytest.raises(NumericalError, match="non-finite"):
        run(SimulationConfig(n=8, T=0.1), tables=get_tables(8, -2.0), f0=f0)


def test_initial_condition_specs():
    grid = make_grid(16, 5.0)
    for name in ("maxwellian", "bimaxwellian", "bimaxwellian_skew", "anisotropic"):
        assert integrate(initial_condition(shipped(name), grid), grid) == pytest.approx(1.0, rel=1e-3)
    bump = initial_condition(shipped("bump"), grid)
    assert bump.min() == 0.0 and bump.max() <= 0.3
    with pytest.raises(ValueError):
        shipped("nope")
    with pytest.raises(ValueError):
        InitialConditionSpec("cauchy")
    with pytest.raises(ValueError):
        initial_condition({"kind": "bump", "radius": 4.5}, grid)
    with pytest.raises(ValueError):
        initial_condition({"kind": "maxwellian", "temperature": -1.0}, grid)
    with pytest.raises(ValueError):
        initial_condition({"kind": "bimaxwellian", "components": [{}]}, grid)
