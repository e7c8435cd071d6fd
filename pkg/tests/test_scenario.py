import math

import numpy as np
import pytest
from scipy.integrate import quad

from vanetconn.scenario import (
    erlang_cdf,
    erlang_pdf,
    placement_from_headways,
    sample_headways,
)


def test_params_reject_nonpositive(make_params):
    for field, bad in [("rho", 0.0), ("road_length", -1.0), ("tx_power", 0.0),
                       ("noise_power", -0.01), ("beta", 0.0), ("psi_db", None)]:
        if field == "psi_db":
            with pytest.raises(ValueError):
                make_params(psi_db=-math.inf)
        else:
            with pytest.raises(ValueError):
                make_params(**{field: bad})
    with pytest.raises(ValueError):
        make_params(ple=0)
    with pytest.raises(ValueError):
        make_params(ple=1.5)


def test_vehicle_count_rule(make_params):
    assert make_params(rho=0.019).n_vehicles == 190
    assert make_params(rho=0.002).n_vehicles == 20
    # floor of 2 vehicles even on a nearly empty road
    assert make_params(rho=1e-9).n_vehicles == 2


def test_headway_sample_mean(make_params):
    # 1e5 draws need N-1 >= 1e5; use a long road instead of many calls
    params = make_params(rho=0.019, road_length=100_001 / 0.019)
    rng = np.random.default_rng(42)
    draws = sample_headways(params, rng)
    assert draws.size >= 100_000
    mean = draws.mean()
    assert abs(mean - 1 / 0.019) < 0.01 * (1 / 0.019), f"mean={mean}"


def test_headways_degenerate_at_huge_density(make_params):
    params = make_params(rho=1e6, road_length=1e-4)
    rng = np.random.default_rng(0)
    draws = sample_headways(params, rng)
    assert np.all(draws < 1e-4)


def test_headways_deterministic_for_fixed_seed(make_params):
    params = make_params()
    a = sample_headways(params, np.random.default_rng(123))
    b = sample_headways(params, np.random.default_rng(123))
    assert np.array_equal(a, b)
    assert np.all(a > 0)


def test_placement_prefix_sums():
    p = placement_from_headways([10.0, 20.0])
    assert np.array_equal(p.positions, [0.0, 10.0, 30.0])
    assert p.distances[0, 2] == 30.0
    assert p.distances[2, 0] == 30.0


def test_placement_rejects_bad_input():
    with pytest.raises(ValueError):
        placement_from_headways([])
    with pytest.raises(ValueError):
        placement_from_headways([1.0, -2.0])


def test_placement_symmetry_and_invariants():
    p = placement_from_headways([5.0, 5.0, 5.0])
    assert p.distances[0, 3] == 15.0 == p.distances[3, 0]
    assert np.array_equal(np.diag(p.distances), np.zeros(4))
    assert np.array_equal(np.diff(p.positions), p.headways)
    # distance grows with neighbour order on a line
    rng = np.random.default_rng(7)
    q = placement_from_headways(rng.exponential(50.0, size=30))
    for i in range(q.n_vehicles - 2):
        row = q.distances[i, i + 1 :]
        assert np.all(np.diff(row) > 0)


def test_placement_arrays_are_locked():
    p = placement_from_headways([1.0, 2.0])
    with pytest.raises(ValueError):
        p.distances[0, 1] = 99.0


def test_erlang_pdf_first_neighbour_is_exponential():
    rho = 0.019
    for x in (0.0, 10.0, 52.6, 400.0):
        assert abs(erlang_pdf(x, 1, rho) - rho * math.exp(-rho * x)) < 1e-15


def test_erlang_pdf_domain():
    assert erlang_pdf(-5.0, 3, 0.019) == 0.0
    with pytest.raises(ValueError):
        erlang_pdf(1.0, 0, 0.019)
    with pytest.raises(ValueError):
        erlang_pdf(1.0, 2, 0.0)


@pytest.mark.parametrize("m", range(1, 11))
def test_erlang_pdf_normalisation(m):
    rho = 0.019
    value, _ = quad(lambda x: erlang_pdf(x, m, rho), 0.0, (50.0 + 2.0 * m) / rho)
    assert abs(value - 1.0) < 1e-9, f"m={m}: integral={value}"


def test_erlang_mean_is_m_over_rho():
    rho = 0.019
    for m in (1, 3, 7):
        mean, _ = quad(lambda x: x * erlang_pdf(x, m, rho), 0.0, (60.0 + 2.0 * m) / rho)
        assert abs(mean - m / rho) < 1e-7 * (m / rho)


def test_erlang_cdf_matches_pdf_quadrature():
    rho = 0.019
    for m, x in ((1, 30.0), (3, 150.0), (5, 251.2), (10, 600.0)):
        oracle, _ = quad(lambda t: erlang_pdf(t, m, rho), 0.0, x)
        assert abs(erlang_cdf(x, m, rho) - oracle) < 1e-10, f"m={m}, x={x}"
    assert erlang_cdf(0.0, 3, rho) == 0.0
    assert erlang_cdf(-1.0, 3, rho) == 0.0


def test_summed_headways_follow_erlang(make_params):
    # smoke-scale convolution check; the acceptance suite runs the full one
    m, rho, n = 3, 0.019, 20_000
    params = make_params(rho=rho, road_length=(m * n + 1) / rho)
    draws = sample_headways(params, np.random.default_rng(11))[: m * n]
    sums = draws.reshape(n, m).sum(axis=1)
    sums.sort()
    grid = np.arange(1, n + 1) / n
    cdf = np.array([erlang_cdf(x, m, rho) for x in sums])
    d_stat = max(np.max(np.abs(grid - cdf)), np.max(np.abs(grid - 1.0 / n - cdf)))
    critical = 1.6276 / math.sqrt(n)  # 1% level
    assert d_stat < critical, f"KS statistic {d_stat:.4f} >= {critical:.4f}"
