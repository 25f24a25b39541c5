import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatgauge.errors import InvalidInputError
from heatgauge.measure import (
    FiniteFunction,
    FiniteKernel,
    FiniteMeasure,
    apply_kernel,
    check_contraction,
    compose_kernels,
    contraction_sweep,
    integral,
    lp_norm,
    pushforward,
    random_instance,
    SWEEP_P_VALUES,
)

# the worked two-point example used throughout
K2 = FiniteKernel([[0.9, 0.1], [0.2, 0.8]])
NU1 = FiniteMeasure([0.5, 0.5])
F2 = FiniteFunction([1.0, -1.0])


def test_pushforward_two_point():
    nu2 = pushforward(K2, NU1)
    np.testing.assert_allclose(nu2.weights, [0.55, 0.45], rtol=0, atol=1e-15)


def test_apply_kernel_two_point():
    af = apply_kernel(K2, F2)
    np.testing.assert_allclose(af.values, [0.8, -0.6], rtol=0, atol=1e-15)


def test_lp_norm_two_point():
    nu2 = pushforward(K2, NU1)
    assert lp_norm(F2, nu2, 2.0) == pytest.approx(1.0, abs=1e-14)


def test_contraction_two_point_frozen_sides():
    rep = check_contraction(K2, NU1, F2, 2.0)
    assert rep.lhs == pytest.approx(math.sqrt(0.5), abs=1e-14)  # 0.70711
    assert rep.rhs == pytest.approx(1.0, abs=1e-14)
    assert rep.verdict == "PASS-exact"
    assert rep.margin > 0


def test_esssup_ignores_zero_mass_points():
    f = FiniteFunction([3.0, 5.0])
    nu = FiniteMeasure([1.0, 0.0])
    assert lp_norm(f, nu, math.inf) == 3.0


def test_identity_kernel_is_equality():
    k = FiniteKernel(np.eye(4))
    nu = FiniteMeasure([0.1, 0.2, 0.3, 0.4])
    f = FiniteFunction([1.0, -2.0, 0.5, 3.0])
    for p in SWEEP_P_VALUES:
        rep = check_contraction(k, nu, f, p)
        assert rep.margin == pytest.approx(0.0, abs=1e-14)
        assert rep.verdict == "PASS-exact"


def test_mass_conservation_and_duality():
    rng = np.random.default_rng(11)
    for _ in range(50):
        k, nu, f = random_instance(rng)
        nu2 = pushforward(k, nu)
        assert nu2.total == pytest.approx(nu.total, abs=1e-12)
        # integral identity: int (A f) d nu = int f d (pushforward nu)
        assert integral(apply_kernel(k, f), nu) == pytest.approx(
            integral(f, nu2), abs=1e-12)


def test_composition_matches_two_step_application():
    rng = np.random.default_rng(5)
    k1, nu, _ = random_instance(rng)
    # build k2 with matching source size
    rows = rng.uniform(size=(k1.n_target, 6)) + 1e-12
    rows /= rows.sum(axis=1, keepdims=True)
    k2 = FiniteKernel(rows)
    f = FiniteFunction(rng.uniform(-1, 1, size=6))
    k12 = compose_kernels(k1, k2)
    via_compose = apply_kernel(k12, f).values
    via_two_step = apply_kernel(k1, apply_kernel(k2, f)).values
    np.testing.assert_allclose(via_compose, via_two_step, atol=1e-14)
    # composed kernel is itself a contraction
    rep = check_contraction(k12, nu, f, 3.0)
    assert rep.ok()


@settings(max_examples=200, deadline=None)
@given(
    data=st.data(),
    n_x=st.integers(1, 8),
    n_y=st.integers(1, 8),
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0, 10.0, math.inf]),
)
def test_contraction_property(data, n_x, n_y, p):
    elems = st.floats(0.0, 1.0, allow_nan=False)
    rows = np.array(
        data.draw(st.lists(st.lists(elems, min_size=n_y, max_size=n_y),
                           min_size=n_x, max_size=n_x)))
    rows = rows + 1e-9  # keep rows normalizable
    rows /= rows.sum(axis=1, keepdims=True)
    w = np.array(data.draw(st.lists(elems, min_size=n_x, max_size=n_x))) + 1e-9
    fv = np.array(data.draw(st.lists(st.floats(-100, 100), min_size=n_y,
                                     max_size=n_y)))
    rep = check_contraction(FiniteKernel(rows), FiniteMeasure(w),
                            FiniteFunction(fv), p)
    assert rep.margin >= -1e-12 * max(1.0, rep.rhs)


def test_sweep_all_pass_and_fast():
    out = contraction_sweep(n_instances=200, seed=3)
    for p, m in out["worst_margin"].items():
        assert m >= -1e-12, f"violation at p={p}"
    assert out["worst_mass_error"] <= 1e-12
    assert out["worst_duality_error"] <= 1e-12


def test_validation_errors():
    with pytest.raises(InvalidInputError):
        FiniteKernel([[0.5, 0.4]])  # row sums to 0.9
    with pytest.raises(InvalidInputError):
        FiniteKernel([[1.1, -0.1]])  # negative entry
    with pytest.raises(InvalidInputError):
        FiniteMeasure([-1.0, 2.0])
    with pytest.raises(InvalidInputError):
        FiniteMeasure([0.0, 0.0])
    with pytest.raises(InvalidInputError):
        lp_norm(F2, NU1, 0.5)
    with pytest.raises(InvalidInputError):
        pushforward(K2, FiniteMeasure([1.0, 1.0, 1.0]))
    with pytest.raises(InvalidInputError):
        apply_kernel(K2, FiniteFunction([1.0, 2.0, 3.0]))
    with pytest.raises(InvalidInputError):
        compose_kernels(K2, FiniteKernel(np.eye(3)))
