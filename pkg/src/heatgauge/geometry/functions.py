"""Test functions on the model geometries and their certification.

Each function carries a claimed class (harmonic, subharmonic or generic
for no claim) and a growth tag.  ``verify_harmonicity`` certifies the
claim: symbolically on the Heisenberg group (polynomials are closed
under the sub-Laplacian), by second-order central finite differences of
the chart Laplacian elsewhere.

Functions may also declare a quadrature reduction:

* ``Separable``: a sum of products of single-coordinate profiles, which
  the Gaussian semigroup on R^n factorizes over;
* ``Radial``: a profile of the distance from a fixed center, usable on
  the two-point homogeneous spaces (R^n, H^3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ClassificationError, InvalidInputError
from ..gamma_calculus import (
    Polynomial, X, Y, Z_COORD, l_op,
)

HARMONIC = "harmonic"
SUBHARMONIC = "subharmonic"
GENERIC = "generic"

BOUNDED = "bounded"
POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class RadialIndicator:
    """The profile r -> 1[r <= radius]; sphere averages of indicators
    have closed forms, so this type is special-cased by quadrature."""

    radius: float

    def __call__(self, r):
        return (np.asarray(r, dtype=float) <= self.radius).astype(float)


@dataclass(frozen=True)
class Radial:
    """f = profile(d(center, .))."""

    center: tuple
    profile: object


@dataclass(frozen=True)
class Separable:
    """f = sum of coeff * prod_axis profile_axis(x_axis) terms.

    ``terms`` is a tuple of (coeff, ((axis, profile), ...)) entries with
    distinct axes inside each product.
    """

    terms: tuple


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # not a pytest class, despite the name

    name: str
    fn: object                       # (m, dim) array -> (m,)
    kind: str = GENERIC
    growth: str = POLYNOMIAL
    poly: Polynomial | None = None   # symbolic form (Heisenberg)
    reduction: object = None         # Separable | Radial | None

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        vals = np.asarray(self.fn(pts[None, :] if single else pts),
                          dtype=float)
        return float(vals[0]) if single else vals


def from_polynomial(name, poly, kind, growth=POLYNOMIAL):
    return TestFunction(name=name, fn=lambda p: poly(p), kind=kind,
                        growth=growth, poly=poly)


def _ident(u):
    return np.asarray(u, dtype=float)


def _square(u):
    u = np.asarray(u, dtype=float)
    return u * u


def euclidean_catalog(n):
    fns = [
        TestFunction("x1", lambda p: p[:, 0], HARMONIC, POLYNOMIAL,
                     reduction=Separable(((1.0, ((0, _ident),)),))),
        TestFunction("x1^2", lambda p: p[:, 0] ** 2, SUBHARMONIC, POLYNOMIAL,
                     reduction=Separable(((1.0, ((0, _square),)),))),
        TestFunction("abs2", lambda p: np.sum(p * p, axis=1), SUBHARMONIC,
                     POLYNOMIAL,
                     reduction=Separable(tuple(
                         (1.0, ((axis, _square),)) for axis in range(n)))),
    ]
    if n >= 2:
        fns.insert(1, TestFunction(
            "x1*x2", lambda p: p[:, 0] * p[:, 1], HARMONIC, POLYNOMIAL,
            reduction=Separable(((1.0, ((0, _ident), (1, _ident))),))))
        fns.insert(2, TestFunction(
            "x1^2-x2^2", lambda p: p[:, 0] ** 2 - p[:, 1] ** 2, HARMONIC,
            POLYNOMIAL,
            reduction=Separable(((1.0, ((0, _square),)),
                                 (-1.0, ((1, _square),))))))
    return fns


def _poisson_kernel_sq(p):
    y = p[:, 2]
    s = p[:, 0] ** 2 + p[:, 1] ** 2 + y ** 2
    return (y / s) ** 2


def _half_space_angle(p):
    # harmonic measure of the half-plane {x1 > 0} seen from p
    return 0.5 * (1.0 + p[:, 0] / np.hypot(p[:, 0], p[:, 2]))


def hyperbolic3_catalog():
    return [
        TestFunction("x1", lambda p: p[:, 0], HARMONIC, POLYNOMIAL),
        # square of the boundary Poisson kernel at 0; harmonic, but it
        # blows up toward its boundary base point (exponential growth in
        # the distance), while still lying in every L^p of the heat
        # kernel measures
        TestFunction("poisson_kernel_sq", _poisson_kernel_sq, HARMONIC,
                     EXPONENTIAL),
        TestFunction("half_space_angle", _half_space_angle, HARMONIC,
                     BOUNDED),
        TestFunction("x1^2", lambda p: p[:, 0] ** 2, SUBHARMONIC,
                     POLYNOMIAL),
    ]


def heisenberg_catalog():
    return [
        from_polynomial("x", X, HARMONIC),
        from_polynomial("y", Y, HARMONIC),
        from_polynomial("z", Z_COORD, HARMONIC),
        from_polynomial("x*y", X * Y, HARMONIC),
        from_polynomial("x^2-y^2", X * X - Y * Y, HARMONIC),
        from_polynomial("x^2", X * X, SUBHARMONIC),
        from_polynomial("x^2+y^2", X * X + Y * Y, SUBHARMONIC),
    ]


def catalog_functions(geom):
    if isinstance(geom, str):
        from . import get_geometry
        geom = get_geometry(geom)
    gid = geom.gid
    if gid.startswith("euclidean:"):
        return euclidean_catalog(geom.dim)
    if gid == "hyperbolic3":
        return hyperbolic3_catalog()
    if gid == "heisenberg":
        return heisenberg_catalog()
    raise InvalidInputError(f"no catalog for geometry {gid!r}")


def catalog_lookup(geom, name):
    for f in catalog_functions(geom):
        if f.name == name:
            return f
    raise InvalidInputError(f"unknown function {name!r} for {geom!r}")


def sample_points(geom, m=100, seed=0):
    """Points in a chart box where certification is well-conditioned."""
    rng = np.random.default_rng(seed)
    if geom.gid == "hyperbolic3":
        pts = rng.uniform(-2.0, 2.0, size=(m, 3))
        pts[:, 2] = rng.uniform(0.5, 2.0, size=m)
        return pts
    return rng.uniform(-2.0, 2.0, size=(m, geom.dim))


def _chart_laplacian_fd(geom, fn, pts, h):
    """Second-order central differences of the chart Laplacian."""
    pts = np.asarray(pts, dtype=float)
    m, n = pts.shape
    f0 = fn(pts)
    lap = np.zeros(m)
    for axis in range(n):
        dp = np.zeros(n)
        dp[axis] = h
        lap += (fn(pts + dp) - 2 * f0 + fn(pts - dp)) / h ** 2
    if geom.gid == "hyperbolic3":
        dy = np.zeros(n)
        dy[2] = h
        first = (fn(pts + dy) - fn(pts - dy)) / (2 * h)
        y = pts[:, 2]
        return y * y * lap - y * first
    if geom.gid.startswith("euclidean:"):
        return lap
    raise InvalidInputError(
        f"no finite-difference chart Laplacian for {geom.gid!r}")


#: residual allowance for finite-difference certification at h = 1e-4
FD_TOL = 1e-5

#: slack for symbolic subharmonicity evaluated at sample points
SYMBOLIC_TOL = 1e-9


def verify_harmonicity(geom, f: TestFunction, points=None, h=1e-4,
                       tol=FD_TOL):
    """Certify the claimed class of f; raises ClassificationError on
    failure and returns a dict with the residual achieved.

    Heisenberg polynomials are certified symbolically (the claim is then
    exact); everything else goes through finite differences of the chart
    Laplacian, so the residual carries an O(h^2) discretization error.
    """
    if f.kind == GENERIC:
        return {"function": f.name, "kind": GENERIC, "residual": 0.0,
                "method": "none"}
    pts = sample_points(geom) if points is None else np.asarray(points, float)

    if geom.gid == "heisenberg":
        if f.poly is None:
            raise InvalidInputError(
                f"{f.name}: Heisenberg certification needs a symbolic form")
        lf = l_op(f.poly, 1)
        if f.kind == HARMONIC:
            resid = lf.max_abs_coeff()
            ok = resid == 0.0
        else:
            vals = lf(pts) if lf.terms else np.zeros(len(pts))
            resid = float(-min(0.0, vals.min()))
            ok = vals.min() >= -SYMBOLIC_TOL
        method = "symbolic"
    else:
        vals = _chart_laplacian_fd(geom, f.fn, pts, h)
        if f.kind == HARMONIC:
            resid = float(np.abs(vals).max())
            ok = resid <= tol
        else:
            resid = float(-min(0.0, vals.min()))
            ok = vals.min() >= -tol
        method = "finite-difference"

    if not ok:
        raise ClassificationError(
            f"{f.name} failed its {f.kind} certification on {geom.gid}: "
            f"residual {resid:.3e}")
    return {"function": f.name, "kind": f.kind, "residual": resid,
            "method": method, "n_points": len(pts)}
