import math

import pytest

import resistor_sep as rs


def test_generate_and_resistance():
    g, corners, origin = rs.generate("sg", 2)
    assert g.num_vertices == 15
    assert g.num_edges == 27
    assert len(corners) == 3
    r = rs.effective_resistance(g, corners[0], corners[1])
    assert r == pytest.approx(50.0 / 27.0, rel=1e-10)


def test_path_laws():
    g, _, _ = rs.generate("path", 10)
    assert rs.effective_resistance(g, 0, 10) == pytest.approx(10.0, rel=1e-10)
    hitting_sum, identity = rs.commute_time(g, 0, 10)
    assert hitting_sum == pytest.approx(identity, rel=1e-8)


def test_json_roundtrip():
    g, _, _ = rs.generate("vicsek", 1)
    text = rs.graph_to_json(g)
    g2, boundary = rs.graph_from_json(text)
    assert boundary is None
    assert rs.graph_to_json(g2) == text


def test_marginal_and_trace():
    g, _, _ = rs.generate("path", 4)
    spec = rs.BoundarySpec([0, 4], [2.0, 0.5], [1.0, 1.5])
    prof = rs.stationary_marginal(g, spec)
    lo, hi = prof["box"]
    assert all(lo <= r <= hi for r in prof["rho"])
    assert prof["route_gap"] < 1e-8

    boundary_idx, chat, kernel = rs.trace_network(g, [g.index_of(0), g.index_of(4)])
    for row in kernel:
        assert sum(row) == pytest.approx(1.0, abs=1e-12)


def test_simulation_conserves_particles():
    g, _, _ = rs.generate("path", 6)
    eta0 = [1, 0, 1, 0, 1, 0, 1]
    out = rs.simulate(g, None, eta0, time_scale=1.0, horizon=3.0, seed=12)
    assert sum(out["final"]) == sum(eta0)
    assert out["rng"] == "philox4x32-10"
    again = rs.simulate(g, None, eta0, time_scale=1.0, horizon=3.0, seed=12)
    assert [e["time"] for e in out["events"]] == [e["time"] for e in again["events"]]


def test_stationary_duality():
    g, _, _ = rs.generate("path", 3)
    spec = rs.BoundarySpec([0, 3], [1.5, 0.5], [0.5, 1.0])
    q = rs.generator_matrix(g, spec)
    weights, residual = rs.stationary_distribution(q)
    assert residual <= 1e-10
    marginals = rs.one_site_marginals(weights, 4)
    rho = rs.stationary_marginal(g, spec)["rho"]
    assert marginals == pytest.approx(rho, abs=1e-8)


def test_mpl_and_two_block():
    g = rs.WeightedGraph.from_edges([(0, 1, 2.0)])
    assert abs(rs.mpl_min_eigenvalue(g, 0, 1, 0.5)) < 1e-12
    rows = rs.verify_two_block_bound([1, 2, 3])
    assert all(row["bound_holds"] for row in rows)
    assert rows[0]["sup_gap"] == pytest.approx(1.0)


def test_scaling_exponents_on_path():
    g, _, _ = rs.generate("path", 128)
    report = rs.scaling_report(g, 0, [1, 2, 4, 8, 16, 32], volume_mode="count")
    assert report["alpha_hat"] == pytest.approx(1.0, abs=0.05)
    assert report["beta_hat"] == pytest.approx(2.0, abs=0.1)
