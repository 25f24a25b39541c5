import math
import os

import numpy as np
import pytest
from scipy import stats

from heatgauge.diffusion import (
    EndpointBatch,
    SimConfig,
    cache_key,
    exit_time_probe,
    load_or_simulate,
    locality_probe,
    read_endpoint_cache,
    simulate,
    simulate_coupled,
    write_endpoint_cache,
)
from heatgauge.errors import (
    CacheFormatError, InvalidInputError, UnsupportedOracleError,
)
from heatgauge.geometry import get_geometry

E1 = get_geometry("euclidean:1")
H3 = get_geometry("hyperbolic3")
HEIS = get_geometry("heisenberg")


def reflection_exit_probability(r, t, terms=40):
    """P(sup_{s<=t} |B_s| >= r) for standard 1-d Brownian motion."""
    acc = 0.0
    for k in range(terms):
        acc += (-1) ** k / (2 * k + 1) * math.exp(
            -(2 * k + 1) ** 2 * math.pi ** 2 * t / (8 * r * r))
    return 1.0 - 4.0 / math.pi * acc


# ------------------------------------------------------------- samplers

def test_euclidean_exact_moments():
    cfg = SimConfig(n_paths=200_000, seed=10)
    batch = simulate(E1, [0.0], 2.0, cfg)
    x = batch.points[:, 0]
    assert abs(x.mean()) < 3 * x.std() / math.sqrt(batch.n)
    assert x.var() == pytest.approx(2.0, rel=0.02)
    assert batch.scheme == "exact" and batch.dt == 0.0


def test_euclidean_euler_same_law():
    cfg = SimConfig(n_paths=50_000, seed=11, scheme="euler", dt=0.125)
    batch = simulate(E1, [1.0], 1.0, cfg)
    ks = stats.kstest((batch.points[:, 0] - 1.0), "norm").statistic
    assert ks < 1.63 / math.sqrt(batch.n)  # ~1% KS band


def test_heisenberg_exact_horizontal_marginals():
    cfg = SimConfig(n_paths=200_000, seed=12, dt=1.0 / 16)
    batch = simulate(HEIS, [0.0, 0.0, 0.0], 1.0, cfg)
    x, y, z = batch.points.T
    n = batch.n
    # horizontal coordinates are exact Brownian marginals at any dt
    for coord in (x, y):
        assert abs(coord.mean()) <= 3 / math.sqrt(n)
        assert coord.var() == pytest.approx(1.0, rel=0.02)
        ks = stats.kstest(coord, "norm").statistic
        assert ks < 1.63 / math.sqrt(n)
    # the midpoint area rule has the exact discrete variance
    # (t^2/4)(1 - dt/t); at dt = t/16 that is 15/64
    assert abs(z.mean()) <= 3 * z.std() / math.sqrt(n)
    target = 0.25 * (1 - 1.0 / 16)
    se = (z * z).std() / math.sqrt(n)
    assert z.var() == pytest.approx(target, abs=3 * se)
    # sign symmetry of the vertical coordinate
    odd3 = (z ** 3).mean()
    assert abs(odd3) <= 3 * (z ** 3).std() / math.sqrt(n)


def test_heisenberg_nonzero_start_mean():
    # from (1, 0, 0): E z_t = 0 and E x_t = 1 by the explicit area formula
    cfg = SimConfig(n_paths=100_000, seed=13, dt=1.0 / 64)
    batch = simulate(HEIS, [1.0, 0.0, 0.0], 1.0, cfg)
    x, _, z = batch.points.T
    assert x.mean() == pytest.approx(1.0, abs=3 / math.sqrt(batch.n))
    assert abs(z.mean()) <= 3 * z.std() / math.sqrt(batch.n)


def test_h3_log_y_is_exact_drifted_brownian():
    t = 0.7
    cfg = SimConfig(n_paths=100_000, seed=14, dt=t / 64)
    batch = simulate(H3, [0.0, 0.0, 1.0], t, cfg)
    u = np.log(batch.points[:, 2])
    n = batch.n
    assert u.mean() == pytest.approx(-t, abs=3 * math.sqrt(t / n))
    assert u.var() == pytest.approx(t, rel=0.03)
    ks = stats.kstest((u + t) / math.sqrt(t), "norm").statistic
    assert ks < 1.63 / math.sqrt(n)
    assert np.all(batch.points[:, 2] > 0)


def test_h3_rejects_exact_scheme():
    with pytest.raises(UnsupportedOracleError):
        simulate(H3, [0, 0, 1], 1.0, SimConfig(n_paths=10, scheme="exact"))
    with pytest.raises(UnsupportedOracleError):
        simulate(HEIS, [0, 0, 0], 1.0, SimConfig(n_paths=10, scheme="exact"))


def test_ragged_step_count_is_absorbed():
    from heatgauge.geometry.euclidean import _step_grid
    steps, sdt = _step_grid(1.0, 0.3)
    assert steps == 4
    np.testing.assert_allclose(sdt, math.sqrt(0.25))


def test_t_zero_returns_start():
    batch = simulate(HEIS, [1.0, 2.0, 3.0], 0.0, SimConfig(n_paths=7, seed=0))
    assert np.all(batch.points == [1.0, 2.0, 3.0])


# ------------------------------------------------------- reproducibility

def test_determinism_across_thread_counts():
    cfg = SimConfig(n_paths=2500, seed=99, chunk_size=1000)
    old = os.environ.get("HEATGAUGE_THREADS")
    try:
        os.environ["HEATGAUGE_THREADS"] = "1"
        a = simulate(HEIS, [0, 0, 0], 0.5, cfg)
        os.environ["HEATGAUGE_THREADS"] = "3"
        b = simulate(HEIS, [0, 0, 0], 0.5, cfg)
    finally:
        if old is None:
            os.environ.pop("HEATGAUGE_THREADS", None)
        else:
            os.environ["HEATGAUGE_THREADS"] = old
    assert a.points.tobytes() == b.points.tobytes()


def test_same_seed_same_endpoints():
    cfg = SimConfig(n_paths=1000, seed=123, chunk_size=256)
    a = simulate(H3, [0, 0, 1], 0.25, cfg)
    b = simulate(H3, [0, 0, 1], 0.25, cfg)
    assert a.points.tobytes() == b.points.tobytes()
    c = simulate(H3, [0, 0, 1], 0.25, SimConfig(n_paths=1000, seed=124,
                                                chunk_size=256))
    assert a.points.tobytes() != c.points.tobytes()


def test_antithetic_pairs_cancel_odd_moments():
    cfg = SimConfig(n_paths=2000, seed=7, antithetic=True)
    batch = simulate(E1, [0.0], 1.0, cfg)
    assert batch.points[:, 0].mean() == pytest.approx(0.0, abs=1e-15)


# ------------------------------------------------------------- richardson

def test_coupled_euclidean_legs_identical():
    fine, coarse = simulate_coupled(E1, [0.0], 1.0,
                                    SimConfig(n_paths=500, seed=3, dt=1 / 8))
    assert fine.points.tobytes() == coarse.points.tobytes()


def discrete_x1_fourth_moment(t, dt):
    """E[x1^4] under the stepped scheme on hyperbolic space, started at
    (0, 0, 1).  Conditionally on the (exact) log-height path the first
    coordinate is centred Gaussian with variance dt * sum exp(2 u_k), so
    the fourth moment is 3 dt^2 sum_{j,k} exp(4 min(j,k) dt)."""
    n = round(t / dt)
    m = np.arange(n)
    return 3 * dt ** 2 * float(np.sum((2 * (n - m) - 1) * np.exp(4 * m * dt)))


def test_h3_weak_bias_matches_discrete_law():
    t = 0.5
    x0 = [0.0, 0.0, 1.0]
    exact = 1.5 * ((math.exp(4 * t) - 1) / 4 - t)
    # the stepped law converges to the true moment as dt -> 0
    assert discrete_x1_fourth_moment(t, t / 4096) == pytest.approx(
        exact, rel=3e-4)

    def paired_gap(dt, seed):
        fine, coarse = simulate_coupled(
            H3, x0, t, SimConfig(n_paths=400_000, seed=seed, dt=dt))
        gf = fine.points[:, 0] ** 4
        gc = coarse.points[:, 0] ** 4
        gap = gc - gf
        corr = np.corrcoef(gf, gc)[0, 1]
        return (gf.mean(), gf.std() / math.sqrt(gf.size),
                gap.mean(), gap.std() / math.sqrt(gap.size), corr)

    est1, ese1, d1, se1, corr1 = paired_gap(t / 16, 21)  # coarse t/8
    est2, ese2, d2, se2, corr2 = paired_gap(t / 32, 22)  # coarse t/16
    # shared increments make the legs strongly coupled
    assert corr1 > 0.9 and corr2 > 0.9
    # each paired gap matches the exact coarse-minus-fine discrete moment
    for dt, d, se in ((t / 16, d1, se1), (t / 32, d2, se2)):
        pred = (discrete_x1_fourth_moment(t, 2 * dt)
                - discrete_x1_fourth_moment(t, dt))
        assert d == pytest.approx(pred, abs=3.5 * se)
        assert abs(d) > 3 * se  # and is resolved, not noise
    # fine-leg estimates match their own discrete law
    assert est1 == pytest.approx(discrete_x1_fourth_moment(t, t / 16),
                                 abs=3.5 * ese1)
    assert est2 == pytest.approx(discrete_x1_fourth_moment(t, t / 32),
                                 abs=3.5 * ese2)


# ------------------------------------------------------------------ probes

def test_locality_probe_r1_oracle():
    # P(|B_{1/4}| <= 1) = 2 Phi(2) - 1 ~ 0.9545
    cfg = SimConfig(n_paths=200_000, seed=31)
    res = locality_probe(E1, [0.0], 1.0, 0.25, cfg)
    oracle = 2 * stats.norm.cdf(2.0) - 1.0
    assert res.value == pytest.approx(oracle, abs=3 * res.stderr + 1e-12)
    assert res.stderr < 1e-3


def test_locality_probe_degenerate_time():
    res = locality_probe(HEIS, [0, 0, 0], 0.5, 0.0, SimConfig(n_paths=10))
    assert res.value == 1.0 and res.stderr == 0.0


def test_locality_probe_monotone_in_s():
    cfg = SimConfig(n_paths=50_000, seed=32)
    grid = [0.1, 0.4, 0.7, 1.0]
    vals = [locality_probe(E1, [0.0], 1.0, s, cfg) for s in grid]
    for a, b in zip(vals, vals[1:]):
        assert b.value <= a.value + 3 * math.hypot(a.stderr, b.stderr)


def test_exit_probe_r1_reflection_oracle():
    r, t = 1.0, 0.25
    cfg = SimConfig(n_paths=100_000, seed=33, dt=t / 1024)
    res = exit_time_probe(E1, [0.0], r, t, cfg)
    oracle = reflection_exit_probability(r, t)
    # discrete monitoring only underestimates
    assert res.value <= oracle + 3 * res.stderr
    assert res.value >= oracle - (3 * res.stderr + 0.02)
    assert res.meta["discrete_monitoring"]


def test_exit_probe_decreasing_in_radius():
    t = 0.25
    cfg = SimConfig(n_paths=20_000, seed=34, dt=t / 256)
    p = [exit_time_probe(E1, [0.0], r, t, cfg).value for r in (0.5, 1.0, 2.0)]
    assert p[0] > p[1] > p[2]
    tiny = exit_time_probe(E1, [0.0], 2.0, 0.01,
                           SimConfig(n_paths=5000, seed=35, dt=0.01 / 64))
    assert tiny.value == 0.0


def test_exit_probe_heisenberg_smoke():
    cfg = SimConfig(n_paths=20_000, seed=36, dt=0.25 / 128)
    res = exit_time_probe(HEIS, [0, 0, 0], 1.0, 0.25, cfg)
    assert 0.0 < res.value < 1.0


# ------------------------------------------------------------------ cache

def test_cache_roundtrip_bitwise(tmp_path):
    batch = simulate(HEIS, [0.5, -0.25, 1.0], 0.5,
                     SimConfig(n_paths=500, seed=77))
    path = tmp_path / "batch.hgeb"
    write_endpoint_cache(path, batch)
    back = read_endpoint_cache(path)
    assert back.geometry_id == batch.geometry_id
    assert back.points.tobytes() == batch.points.tobytes()
    assert (back.t, back.seed, back.dt, back.scheme) \
        == (batch.t, batch.seed, batch.dt, batch.scheme)
    np.testing.assert_array_equal(back.start, batch.start)


def test_cache_rejects_garbage(tmp_path):
    p = tmp_path / "bad.hgeb"
    p.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(CacheFormatError):
        read_endpoint_cache(p)
    batch = simulate(E1, [0.0], 0.1, SimConfig(n_paths=8, seed=1))
    write_endpoint_cache(p, batch)
    raw = bytearray(p.read_bytes())
    raw[4:6] = (99).to_bytes(2, "little")  # future version
    p.write_bytes(bytes(raw))
    with pytest.raises(CacheFormatError):
        read_endpoint_cache(p)
    write_endpoint_cache(p, batch)
    p.write_bytes(p.read_bytes()[:-8])  # truncate payload
    with pytest.raises(CacheFormatError):
        read_endpoint_cache(p)


def test_load_or_simulate_reuses_cache(tmp_path):
    cfg = SimConfig(n_paths=300, seed=5)
    a = load_or_simulate(E1, [0.0], 1.0, cfg, cache_dir=str(tmp_path))
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    key = cache_key("euclidean:1", [0.0], 1.0, 300, 5, 0.0, "exact")
    assert files[0].name == key + ".hgeb"
    b = load_or_simulate(E1, [0.0], 1.0, cfg, cache_dir=str(tmp_path))
    assert a.points.tobytes() == b.points.tobytes()


def test_config_validation():
    with pytest.raises(InvalidInputError):
        SimConfig(n_paths=0)
    with pytest.raises(InvalidInputError):
        SimConfig(n_paths=10, seed=-1)
    with pytest.raises(InvalidInputError):
        SimConfig(n_paths=10, dt=0.0)
    with pytest.raises(InvalidInputError):
        SimConfig(n_paths=10, scheme="milstein")
    with pytest.raises(InvalidInputError):
        EndpointBatch("hyperbolic3", np.array([0, 0, 1.0]), 1.0,
                      np.array([[0.0, 0.0, -1.0]]), 0, 0.1, "euler")
