import numpy as np
import pytest

from vanetconn import analytic
from vanetconn.montecarlo import (
    RAYLEIGH,
    UNIT_DISC,
    estimate_connectivity,
    estimate_node_degree,
    estimate_single_link,
    estimate_vehicle_connectivity,
    run_ensemble,
    run_trial,
    sweep,
    trial_rng,
    wilson_interval,
)

SWEEP_KW = dict(
    road_length=10_000.0,
    tx_power=10**3.3,
    noise_power=0.01,
    beta=10.0,
    ple=2,
)


def test_trial_with_vanishing_threshold_is_complete(make_params):
    params = make_params(rho=0.004, psi_db=-250.0)
    outcome = run_trial(params, UNIT_DISC, trial_rng(1, 0), big_m=3)
    n = params.n_vehicles
    assert outcome.connected
    assert outcome.degrees.tolist() == [n - 1] * n
    assert outcome.n_isolated_two_side == 0
    assert outcome.n_isolated_forward == 0
    assert outcome.linked_pairs_by_gap.tolist() == [n - 1, n - 2, n - 3]


def test_trial_sparse_road_is_disconnected(make_params):
    # headways run ~1/rho = 1e5 m, far beyond the 251 m radius
    params = make_params(rho=1e-5, road_length=3e6)
    outcome = run_trial(params, UNIT_DISC, trial_rng(1, 0))
    assert not outcome.connected
    assert outcome.n_isolated_two_side > params.n_vehicles // 2


def test_trial_deterministic_for_fixed_stream(make_params):
    params = make_params(rho=0.01)
    a = run_trial(params, RAYLEIGH, trial_rng(7, 3), big_m=5)
    b = run_trial(params, RAYLEIGH, trial_rng(7, 3), big_m=5)
    assert a.connected == b.connected
    assert np.array_equal(a.degrees, b.degrees)
    assert np.array_equal(a.linked_pairs_by_gap, b.linked_pairs_by_gap)


def test_trial_validates_inputs(make_params):
    params = make_params()
    with pytest.raises(ValueError):
        run_trial(params, "freespace", trial_rng(0, 0))
    with pytest.raises(ValueError):
        run_trial(params, UNIT_DISC, trial_rng(0, 0), decider="oracle")


def test_connected_trials_have_no_isolated_vehicles(make_params):
    params = make_params(rho=0.019)
    for t in range(40):
        outcome = run_trial(params, RAYLEIGH, trial_rng(11, t))
        if outcome.connected:
            assert outcome.n_isolated_two_side == 0


def test_unit_disc_connectivity_equals_successor_rule(make_params):
    # on a unit disc the network is connected exactly when every spacing
    # fits inside the communication radius
    from vanetconn.scenario import sample_headways

    params = make_params(rho=0.008)
    r = analytic.communication_range(params)
    for t in range(60):
        rng = trial_rng(23, t)
        outcome = run_trial(params, UNIT_DISC, trial_rng(23, t))
        headways = sample_headways(params, rng)
        assert outcome.connected == bool(np.all(headways <= r)), f"trial {t}"


def test_wilson_interval_basics():
    lo, hi = wilson_interval(8, 10)
    assert 0.0 <= lo < 0.8 < hi <= 1.0
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and hi > 0.0
    lo, hi = wilson_interval(10, 10)
    assert hi == 1.0 and lo < 1.0
    lo, hi = wilson_interval(1, 1)
    assert lo <= 1.0 <= hi
    with pytest.raises(ValueError):
        wilson_interval(5, 4)


def test_connectivity_estimate_matches_closed_form(make_params):
    params = make_params(rho=0.019)
    est = estimate_connectivity(params, UNIT_DISC, trials=400, master_seed=5)
    assert est.covers(analytic.p_network_ud(params)), (
        f"[{est.ci_lo:.3f}, {est.ci_hi:.3f}] misses {analytic.p_network_ud(params):.3f}"
    )


def test_degenerate_single_trial(make_params):
    params = make_params(rho=0.004, psi_db=-250.0)
    est = estimate_connectivity(params, UNIT_DISC, trials=1, master_seed=0)
    assert est.estimate == 1.0
    assert est.ci_lo <= 1.0 <= est.ci_hi


def test_single_link_estimates(make_params):
    params = make_params()
    est = estimate_single_link(params, UNIT_DISC, m=1, trials=250, master_seed=10)
    assert est.covers(analytic.p_sl_ud_first(params))
    ray = estimate_single_link(params, RAYLEIGH, m=1, trials=250, master_seed=10)
    assert ray.covers(analytic.p_sl_rayleigh(params, 1))
    with pytest.raises(ValueError):
        estimate_single_link(params, UNIT_DISC, m=params.n_vehicles, trials=5, master_seed=0)
    # far gap on a nearly empty road never links
    sparse = make_params(rho=0.0004)
    far = estimate_single_link(sparse, UNIT_DISC, m=sparse.n_vehicles - 1,
                               trials=100, master_seed=2)
    assert far.estimate == 0.0


def test_node_degree_estimates(make_params):
    params = make_params(rho=0.019)
    est = estimate_node_degree(params, RAYLEIGH, trials=300, master_seed=3)
    target = analytic.avg_node_degree(params)
    assert abs(est.mean - target) < 3 * est.std_error + 0.05 * target
    everyone = make_params(rho=0.004, psi_db=-250.0)
    full = estimate_node_degree(everyone, UNIT_DISC, trials=3, master_seed=1)
    assert full.mean == everyone.n_vehicles - 1
    assert full.std_error == 0.0


def test_unit_disc_degree_scales_with_density(make_params):
    base = make_params(rho=0.01)
    double = make_params(rho=0.02)
    d1 = estimate_node_degree(base, UNIT_DISC, trials=300, master_seed=8)
    d2 = estimate_node_degree(double, UNIT_DISC, trials=300, master_seed=8)
    assert abs(d2.mean / d1.mean - 2.0) < 0.15


def test_vehicle_connectivity_estimates(make_params):
    params = make_params(rho=0.019)
    everyone = make_params(rho=0.01, psi_db=-250.0)
    for side in ("one", "two"):
        est = estimate_vehicle_connectivity(everyone, RAYLEIGH, side, trials=5, master_seed=4)
        assert est.estimate == 1.0
    one_side = estimate_vehicle_connectivity(params, UNIT_DISC, "one", trials=300, master_seed=12)
    assert one_side.covers(analytic.p_vehicle_ud(params))
    two_side = estimate_vehicle_connectivity(params, RAYLEIGH, "two", trials=300, master_seed=12)
    assert two_side.estimate <= analytic.p_vehicle_rayleigh(params, 10) + 2e-3
    backward = estimate_vehicle_connectivity(params, UNIT_DISC, "one", trials=50,
                                             master_seed=12, direction="backward")
    assert 0.0 <= backward.estimate <= 1.0
    with pytest.raises(ValueError):
        estimate_vehicle_connectivity(params, UNIT_DISC, "three", trials=5, master_seed=0)


def test_parallel_run_is_bit_identical(make_params):
    params = make_params(rho=0.008)
    serial = run_ensemble(params, RAYLEIGH, trials=60, master_seed=21, big_m=4)
    parallel = run_ensemble(params, RAYLEIGH, trials=60, master_seed=21, big_m=4, workers=3)
    assert serial.network_connectivity() == parallel.network_connectivity()
    assert serial.single_link(4) == parallel.single_link(4)
    assert serial.node_degree() == parallel.node_degree()
    for a, b in zip(serial.stats, parallel.stats):
        assert a.connected == b.connected
        assert np.array_equal(a.linked_by_gap, b.linked_by_gap)
        assert a.degree_mean_interior == b.degree_mean_interior


def test_decider_paths_agree(make_params):
    params = make_params(rho=0.012)
    both = run_ensemble(params, RAYLEIGH, trials=80, master_seed=31, decider="both")
    assert both.decider_mismatches() == 0
    components = run_ensemble(params, RAYLEIGH, trials=80, master_seed=31, decider="components")
    assert components.network_connectivity() == both.network_connectivity()


def test_sweep_rows(make_params):
    grid = [(0.019, 10**1.5), (0.019, 10**1.5)]
    rows = sweep(grid, (UNIT_DISC,), trials=60, master_seed=17, **SWEEP_KW)
    assert [r.model for r in rows] == [UNIT_DISC, UNIT_DISC]
    first, second = rows
    # a duplicated grid point reproduces the identical row
    assert first.result.network_connectivity() == second.result.network_connectivity()
    direct = estimate_connectivity(make_params(rho=0.019), UNIT_DISC, trials=60, master_seed=17)
    assert first.result.network_connectivity().estimate == direct.estimate


def test_sweep_records_failures_and_continues():
    rows = sweep([(-1.0, 31.6), (0.02, 31.6)], (UNIT_DISC,), trials=5, master_seed=1, **SWEEP_KW)
    assert rows[0].error is not None and "rho" in rows[0].error
    assert rows[0].result is None
    assert rows[1].error is None and rows[1].result is not None


def test_sweep_requires_points():
    with pytest.raises(ValueError):
        sweep([], (UNIT_DISC,), trials=5, master_seed=1, **SWEEP_KW)


def test_estimator_error_shrinks_with_trials(make_params):
    # 80 vehicles at a density where roughly half the snapshots connect
    params = make_params(rho=0.019, road_length=4210.0)
    truth = analytic.p_network_ud(params)
    assert 0.3 < truth < 0.7
    errors = {
        trials: abs(
            estimate_connectivity(params, UNIT_DISC, trials, master_seed=77).estimate - truth
        )
        for trials in (100, 1000, 10_000)
    }
    assert errors[10_000] < errors[100], errors
    assert errors[10_000] < 2e-2 and errors[1000] < 5e-2, errors
