from fractions import Fraction

import numpy as np
import pytest

from heatgauge.errors import InvalidInputError
from heatgauge.gamma_calculus import (
    CDParams,
    HEISENBERG_CD,
    Polynomial,
    X, Y, Z_COORD, ONE,
    Y1, Y2, Z,
    cd_margin_poly,
    check_cd,
    default_cd_points,
    gamma,
    gamma2,
    gamma2_z,
    gamma_z,
    l_op,
    lie_bracket,
    random_polynomial,
)

HALF = Fraction(1, 2)


def test_polynomial_algebra_basics():
    f = (X + Y) * (X - Y)
    assert f == X * X - Y * Y
    assert f.diff(0) == 2 * X
    assert f((2.0, 1.0, 5.0)) == pytest.approx(3.0)
    pts = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    np.testing.assert_allclose(f(pts), [1.0, -4.0])
    assert (f - f).is_zero()
    assert Polynomial({}).degree() == 0
    assert ((X * Y * Z_COORD) * (X * X)).degree() == 5


def test_frame_bracket_relations():
    b12 = lie_bracket(Y1, Y2)
    for axis, expect in [(0, Polynomial({})), (1, Polynomial({})), (2, ONE)]:
        coord = Polynomial.coordinate(axis)
        assert b12(coord) == expect  # [Y1, Y2] = Z
    for v in (Y1, Y2):
        bz = lie_bracket(v, Z)
        for axis in range(3):
            assert bz(Polynomial.coordinate(axis)) == Polynomial({})


def test_l_op_frozen_values():
    assert l_op(X * X, convention=HALF) == ONE          # L(x^2) = 1 at c=1/2
    assert l_op(X * X + Y * Y, convention=1) == 4 * ONE  # = 4 at c=1
    with pytest.raises(InvalidInputError):
        l_op(X, convention=0.3)


def test_harmonic_polynomials_annihilated():
    for f in (X, Y, Z_COORD, X * Y, X * X - Y * Y):
        assert l_op(f, convention=1).is_zero()
        assert l_op(f, convention=HALF).is_zero()


def test_gamma_frozen_values():
    assert gamma(Z_COORD, Z_COORD) == HALF * HALF * (X * X + Y * Y)  # (x^2+y^2)/4
    assert gamma_z(Z_COORD, Z_COORD) == ONE
    assert gamma(X, X) == ONE
    assert gamma2(Z_COORD) == Polynomial.constant(HALF)
    assert gamma2_z(Z_COORD) == Polynomial({})


def test_l_op_matches_finite_differences():
    # independent numeric oracle: the chart expansion of Y1^2 + Y2^2 is
    # dxx + dyy + ((x^2+y^2)/4) dzz - y dxz + x dyz
    rng = np.random.default_rng(42)
    h = 1e-4
    for _ in range(10):
        f = random_polynomial(rng, max_degree=3)
        p = rng.uniform(-1.5, 1.5, size=3)

        def ev(dx=0.0, dy=0.0, dz=0.0):
            return f(p + np.array([dx, dy, dz]))

        dxx = (ev(dx=h) - 2 * ev() + ev(dx=-h)) / h ** 2
        dyy = (ev(dy=h) - 2 * ev() + ev(dy=-h)) / h ** 2
        dzz = (ev(dz=h) - 2 * ev() + ev(dz=-h)) / h ** 2
        dxz = (ev(dx=h, dz=h) - ev(dx=h, dz=-h) - ev(dx=-h, dz=h)
               + ev(dx=-h, dz=-h)) / (4 * h ** 2)
        dyz = (ev(dy=h, dz=h) - ev(dy=h, dz=-h) - ev(dy=-h, dz=h)
               + ev(dy=-h, dz=-h)) / (4 * h ** 2)
        x, y = p[0], p[1]
        numeric = dxx + dyy + (x * x + y * y) / 4 * dzz - y * dxz + x * dyz
        assert l_op(f, 1)(p) == pytest.approx(numeric, abs=5e-5, rel=1e-5)


def test_cd_margin_coordinate_function():
    # f = x: margin reduces to kappa/nu * Gamma = 1/nu
    m = cd_margin_poly(X, HEISENBERG_CD, nu=1)
    assert m == ONE
    m_small = cd_margin_poly(X, HEISENBERG_CD, nu=Fraction(1, 10))
    assert m_small == 10 * ONE


def test_cd_margin_vertical_coordinate():
    # f = z: margin is (x^2+y^2)/(4 nu), tight at the origin
    for nu in (Fraction(1, 10), 1, 10):
        m = cd_margin_poly(Z_COORD, HEISENBERG_CD, nu=nu)
        assert m == Fraction(1, 4) / nu * (X * X + Y * Y)
    res = check_cd(Z_COORD)
    assert res.passed
    assert res.min_margin == pytest.approx(0.0, abs=1e-12)
    assert res.witness_point == (0.0, 0.0, 0.0)


def test_cd_sweep_random_cubics():
    rng = np.random.default_rng(7)
    pts = default_cd_points(rng)
    for _ in range(60):
        f = random_polynomial(rng, max_degree=3)
        res = check_cd(f, HEISENBERG_CD, points=pts)
        assert res.passed, (f, res.min_margin)


def test_cd_perturbed_params_fail():
    # rho2 = 5 is not a valid CD parameter for this group; f = z sees it
    bad = CDParams(0, 5, 1, 2)
    res = check_cd(Z_COORD, bad)
    assert not res.passed
    assert res.min_margin < -1.0  # margin at origin is 1/2 - 5 = -4.5


def test_cd_rejects_bad_inputs():
    with pytest.raises(InvalidInputError):
        CDParams(0, 0, 1, 2)  # rho2 must be positive
    with pytest.raises(InvalidInputError):
        cd_margin_poly(X, HEISENBERG_CD, nu=0)
    with pytest.raises(InvalidInputError):
        check_cd(X, points=np.zeros((3, 2)))
