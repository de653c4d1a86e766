import dataclasses
import logging

import numpy as np
import pytest

from covigov import AbmConfig, InvalidConfig, Network, OpinionParams, generate_scale_free, integrate_opinion
from covigov.abm import I1, I2, R, S, B, branch_probabilities, random_network, run, seed_states, simulate_once, step
from covigov.opinion import is_single_peaked

log = logging.getLogger(__name__)


def test_scale_free_structure():
    net = generate_scale_free(1000, 3, 42)
    assert net.is_connected()
    assert 2 * net.n_edges == net.degrees.sum()
    assert net.n_edges == 3 * (1000 - 4) + 6
    assert net.edges[:, 0].min() >= 0 and np.all(net.edges[:, 0] < net.edges[:, 1])
    assert len(net.edge_set()) == net.n_edges


def test_scale_free_deterministic():
    a = generate_scale_free.__wrapped__(300, 3, 5)
    b = generate_scale_free.__wrapped__(300, 3, 5)
    assert a.edge_set() == b.edge_set()
    assert a.edge_set() != generate_scale_free.__wrapped__(300, 3, 6).edge_set()


def test_heavy_tail():
    votes = 0
    for seed in range(10):
        d = generate_scale_free(1000, 3, seed).degrees
        votes += d.max() >= 5 * d.mean()
    assert votes > 5


def test_scale_free_arguments():
    with pytest.raises(InvalidConfig):
        generate_scale_free(3, 3, 0)
    with pytest.raises(InvalidConfig):
        generate_scale_free(10, 0, 0)


def test_network_rejects_self_loops():
    with pytest.raises(InvalidConfig):
        Network.from_edges(3, [(0, 0)])


def test_seed_states_counts():
    net = generate_scale_free(1000, 3, 42)
    st = seed_states(net, (800, 100, 50, 50, 0), 1)
    assert tuple(np.bincount(st, minlength=5)) == (800, 100, 50, 50, 0)
    assert np.all(seed_states(net, (1000, 0, 0, 0, 0), 1) == S)
    with pytest.raises(InvalidConfig):
        seed_states(net, (799, 100, 50, 50, 0), 1)


def test_step_absorbing_and_frozen():
    net = generate_scale_free(200, 3, 1)
    rng = np.random.default_rng(0)
    all_r = np.full(200, R, dtype=np.int8)
    assert np.all(step(net, all_r, OpinionParams.control(), rng) == R)
    st = seed_states(net, (100, 20, 40, 40, 0), rng)
    p = OpinionParams.control(sigma=0.0, theta=0.0)
    for _ in range(20):
        new = step(net, st, p, rng)
        assert np.all(new[st == S] == S)
        st = new


def test_step_i1_clamps_to_recovery():
    net = generate_scale_free(200, 3, 1)
    st = seed_states(net, (100, 20, 40, 40, 0), 2)
    p = OpinionParams.control(k=1.0, m1=1.0, m2=0.0, n1=1.0)
    new = step(net, st, p, np.random.default_rng(3))
    assert np.all(new[st == I1] == R)


def test_step_is_synchronous():
    # a path S - I2 - S: both S nodes see the same pre-tick I2 neighbour
    net = Network.from_edges(3, [(0, 1), (1, 2)])
    st = np.array([S, I2, S], dtype=np.int8)
    p = OpinionParams.control(sigma=1.0, theta=0.0, k=1.0, m1=1.0, m2=0.0, n1=1.0, n2=0.99)
    new = step(net, st, p, np.random.default_rng(0))
    assert list(new) == [B, R, B]


def test_branch_probabilities():
    p1, p2 = branch_probabilities(OpinionParams.control(z1=1.0, z2=0.0, a1=0.5, a2=0.5))
    assert p1 + p2 == pytest.approx(1.0)
    assert p1 / p2 == pytest.approx(1.0 / 0.5)
    assert branch_probabilities(OpinionParams.control(a1=0.1, a2=0.1, z1=0.2, z2=0.8)) == pytest.approx((0.3 / 1.2, 0.9 / 1.2))
    assert branch_probabilities(OpinionParams.control(a1=0.0, a2=0.0, z1=0.2, z2=0.8)) == pytest.approx((0.2, 0.8))


def test_config_validation():
    with pytest.raises(InvalidConfig):
        AbmConfig(initial=(800, 100, 50, 49, 0))
    with pytest.raises(InvalidConfig):
        AbmConfig(runs=0)


def test_bookkeeping_and_monotone_r():
    cfg = AbmConfig(runs=3, ticks=40)
    for seed in range(3):
        counts = simulate_once(cfg, OpinionParams.control(), seed)
        assert np.all(counts.sum(axis=1) == 1000)
        assert np.all(np.diff(counts[:, R]) >= 0)


def test_inflow_grows_population():
    cfg = AbmConfig(n=100, initial=(80, 10, 5, 5, 0), ticks=10, runs=1, inflow=2)
    counts = simulate_once(cfg, OpinionParams.control(), 0)
    np.testing.assert_array_equal(counts.sum(axis=1), 100 + 2 * np.arange(11))


def test_run_deterministic():
    cfg = AbmConfig(runs=4, ticks=30, base_seed=11)
    a, b = run(cfg, OpinionParams.control()), run(cfg, OpinionParams.control())
    np.testing.assert_array_equal(a.mean_counts, b.mean_counts)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "tick,S,B,I1,I2,R"
    c = run(dataclasses.replace(cfg, base_seed=12), OpinionParams.control())
    assert not np.array_equal(a.mean_counts, c.mean_counts)


def test_control_curve_rises_and_dies_out():
    res = run(AbmConfig(runs=50), OpinionParams.control())
    i2 = res.mean_counts[:, I2]
    assert is_single_peaked(i2)
    assert i2.argmax() > 0 and i2[-1] == 0
    assert res.extinct_runs == 50
    assert np.all(res.population == 1000)


def test_mean_field_smoke():
    cfg = AbmConfig(runs=10, ticks=60)
    p = OpinionParams.control(sigma=0.004)
    res = run(cfg, p, network_factory=lambda seed: random_network(1000, 0.05, seed))
    ode = integrate_opinion(p, cfg.initial, 60, 0.01)
    abm_curve, ode_curve = res.mean_counts[:, I2], ode.states[:, 3]
    t_abm, t_ode = abm_curve.argmax(), ode.t[ode_curve.argmax()]
    log.info("I2 peak time: agent-based %s, ODE %.2f", t_abm, t_ode)
    assert is_single_peaked(abm_curve) and is_single_peaked(ode_curve)
