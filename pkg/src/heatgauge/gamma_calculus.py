"""Symbolic Gamma-calculus for the first Heisenberg group.

Polynomials in the exponential coordinates (x, y, z) form an algebra that
is closed under the left-invariant frame

    Y1 = d/dx - (y/2) d/dz,   Y2 = d/dy + (x/2) d/dz,   Z = d/dz,

so the carre du champ operators and the generalized curvature-dimension
margin can be computed exactly (rational arithmetic as long as the input
coefficients are exact).  The CD inequality checked here, with parameters
(rho1, rho2, kappa, d), reads

    Gamma2(f) + nu * Gamma2^Z(f)
        >= (1/d) (L f)^2 + (rho1 - kappa/nu) Gamma(f) + rho2 Gamma^Z(f)

for every nu > 0.  The Heisenberg group satisfies it with parameters
(0, 1/2, 1, 2) when L = Y1^2 + Y2^2 (convention c = 1); the diffusion
modules use the probabilist's c = 1/2 instead, hence the convention flag
on ``l_op``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError

HALF = Fraction(1, 2)


class Polynomial:
    """A real polynomial in (x, y, z), stored as {(i, j, k): coeff}.

    Coefficients may be ints, Fractions or floats; arithmetic preserves
    exactness when the inputs are exact.  Instances are treated as
    immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for expo, coeff in terms.items():
                if len(expo) != 3 or any(e < 0 for e in expo):
                    raise InvalidInputError(f"bad exponent tuple {expo!r}")
                if coeff != 0:
                    clean[tuple(int(e) for e in expo)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0): c})

    @classmethod
    def coordinate(cls, axis):
        expo = [0, 0, 0]
        expo[axis] = 1
        return cls({tuple(expo): 1})

    # -- algebra ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (TypeError, InvalidInputError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def diff(self, axis):
        out = {}
        for e, c in self.terms.items():
            if e[axis] > 0:
                ne = list(e)
                ne[axis] -= 1
                out[tuple(ne)] = out.get(tuple(ne), 0) + c * e[axis]
        return Polynomial(out)

    def degree(self):
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_zero(self, tol=0.0):
        if tol == 0.0:
            return not self.terms
        scale = max((abs(float(c)) for c in self.terms.values()), default=0.0)
        return scale <= tol

    def max_abs_coeff(self):
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def __call__(self, points):
        """Evaluate at points of shape (3,) or (m, 3); returns float(s)."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.shape[-1] != 3:
            raise InvalidInputError("points must have 3 coordinates")
        acc = np.zeros(pts.shape[0])
        for (i, j, k), c in self.terms.items():
            acc += float(c) * pts[:, 0] ** i * pts[:, 1] ** j * pts[:, 2] ** k
        return float(acc[0]) if single else acc

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for e in sorted(self.terms):
            mono = "".join(f"{v}^{n}" for v, n in zip("xyz", e) if n)
            bits.append(f"{self.terms[e]}*{mono}" if mono else f"{self.terms[e]}")
        return "Polynomial(" + " + ".join(bits) + ")"


def _coerce(obj):
    if isinstance(obj, Polynomial):
        return obj
    if isinstance(obj, (int, float, Fraction)):
        return Polynomial.constant(obj)
    raise TypeError(f"cannot coerce {type(obj).__name__} to Polynomial")


X = Polynomial.coordinate(0)
Y = Polynomial.coordinate(1)
Z_COORD = Polynomial.coordinate(2)
ONE = Polynomial.constant(1)


@dataclass(frozen=True)
class VectorField:
    """First-order operator a d/dx + b d/dy + c d/dz with polynomial
    coefficients."""

    ax: Polynomial
    ay: Polynomial
    az: Polynomial
    name: str = ""

    def __call__(self, f: Polynomial) -> Polynomial:
        return self.ax * f.diff(0) + self.ay * f.diff(1) + self.az * f.diff(2)


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """[v, w] as a vector field (first-order fields are closed under it)."""
    coeffs = []
    for axis in range(3):
        coord = Polynomial.coordinate(axis)
        coeffs.append(v(w(coord)) - w(v(coord)))
    return VectorField(*coeffs, name=f"[{v.name},{w.name}]")


#: the left-invariant frame in exponential coordinates
Y1 = VectorField(ONE, Polynomial({}), -HALF * Y, name="Y1")
Y2 = VectorField(Polynomial({}), ONE, HALF * X, name="Y2")
Z = VectorField(Polynomial({}), Polynomial({}), ONE, name="Z")

VALID_CONVENTIONS = (1, HALF)


def _check_convention(c):
    if c == 1:
        return 1
    if c == HALF or c == 0.5:
        return HALF
    raise InvalidInputError(f"convention must be 1 or 1/2, got {c!r}")


def l_op(f: Polynomial, convention=1) -> Polynomial:
    """The sub-Laplacian c * (Y1^2 + Y2^2) f for c in {1, 1/2}."""
    c = _check_convention(convention)
    return c * (Y1(Y1(f)) + Y2(Y2(f)))


def gamma(f: Polynomial, g: Polynomial) -> Polynomial:
    """Horizontal carre du champ (Y1 f)(Y1 g) + (Y2 f)(Y2 g)."""
    return Y1(f) * Y1(g) + Y2(f) * Y2(g)


def gamma_z(f: Polynomial, g: Polynomial) -> Polynomial:
    """Vertical carre du champ (Z f)(Z g)."""
    return Z(f) * Z(g)


def gamma2(f: Polynomial, convention=1) -> Polynomial:
    """Gamma_2(f, f) = 1/2 (L Gamma(f, f) - 2 Gamma(f, L f))."""
    lf = l_op(f, convention)
    return HALF * (l_op(gamma(f, f), convention) - 2 * gamma(f, lf))


def gamma2_z(f: Polynomial, convention=1) -> Polynomial:
    """Gamma_2^Z(f, f) = 1/2 (L Gamma^Z(f, f) - 2 Gamma^Z(f, L f))."""
    lf = l_op(f, convention)
    return HALF * (l_op(gamma_z(f, f), convention) - 2 * gamma_z(f, lf))


@dataclass(frozen=True)
class CDParams:
    """Parameters of the generalized curvature-dimension inequality."""

    rho1: object
    rho2: object
    kappa: object
    d: object

    def __post_init__(self):
        if not (float(self.rho2) > 0 and float(self.kappa) >= 0
                and float(self.d) > 0):
            raise InvalidInputError(
                "CD parameters need rho2 > 0, kappa >= 0, d > 0")


#: parameters satisfied by the Heisenberg sub-Laplacian with c = 1
HEISENBERG_CD = CDParams(0, HALF, 1, 2)


def cd_margin_poly(f: Polynomial, params: CDParams, nu,
                   convention=1) -> Polynomial:
    """The margin polynomial of the CD inequality at a fixed nu > 0."""
    if not float(nu) > 0:
        raise InvalidInputError(f"nu must be positive, got {nu!r}")
    lf = l_op(f, convention)
    g = gamma(f, f)
    gz = gamma_z(f, f)
    inv_d = Fraction(1, params.d) if isinstance(params.d, int) \
        else 1.0 / float(params.d)
    kappa_over_nu = (Fraction(params.kappa, 1) / nu
                     if isinstance(nu, (int, Fraction))
                     and isinstance(params.kappa, int)
                     else float(params.kappa) / float(nu))
    return (gamma2(f, convention) + nu * gamma2_z(f, convention)
            - inv_d * (lf * lf)
            - (params.rho1 - kappa_over_nu) * g
            - params.rho2 * gz)


#: default nu grid for CD checks
CD_NU_GRID = (Fraction(1, 10), 1, 10)

#: default margin slack; margins this far below zero still PASS
CD_TOL = 1e-9


@dataclass
class CDCheckResult:
    """Outcome of a pointwise CD margin check."""

    min_margin: float
    witness_point: tuple
    witness_nu: float
    passed: bool
    n_evaluations: int

    def __bool__(self):
        return self.passed


def default_cd_points(rng=None, n_random=20, box=2.0):
    """The origin plus n_random uniform points in [-box, box]^3."""
    rng = np.random.default_rng(0) if rng is None else rng
    pts = rng.uniform(-box, box, size=(n_random, 3))
    return np.vstack([[0.0, 0.0, 0.0], pts])


def check_cd(f: Polynomial, params: CDParams = HEISENBERG_CD, points=None,
             nus=CD_NU_GRID, convention=1, tol=CD_TOL) -> CDCheckResult:
    """Evaluate the CD margin of f on a point grid for each nu.

    Returns the worst margin together with the witnessing (point, nu).
    The check passes when the worst margin is >= -tol.
    """
    pts = default_cd_points() if points is None else np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidInputError("points must be an (m, 3) array")
    best = np.inf
    witness = (pts[0], float(nus[0]))
    count = 0
    for nu in nus:
        margin = cd_margin_poly(f, params, nu, convention)(pts)
        count += margin.size
        i = int(np.argmin(margin))
        if margin[i] < best:
            best = float(margin[i])
            witness = (tuple(float(v) for v in pts[i]), float(nu))
    return CDCheckResult(min_margin=best, witness_point=witness[0],
                         witness_nu=witness[1], passed=best >= -tol,
                         n_evaluations=count)


def random_polynomial(rng, max_degree=3, coeff_scale=1.0):
    """Random float-coefficient polynomial of total degree <= max_degree."""
    terms = {}
    for e in itertools.product(range(max_degree + 1), repeat=3):
        if 0 < sum(e) <= max_degree:
            terms[e] = coeff_scale * rng.uniform(-1.0, 1.0)
    return Polynomial(terms)
