"""Radial quadrature against exact heat kernels.

Integrals of radial functions against the heat kernel measure reduce to
one-dimensional integrals over the distance,

    int f d mu_t = int_0^inf f(r) mu_t(r) A(r) dr,

where A is the geodesic sphere area.  The integration window starts at a
bulk radius containing essentially all the mass and doubles outward
until the added tail is negligible, so integrands of any polynomial or
mildly exponential growth are handled without tuning.

``heat_op_radial`` extends this to the heat semigroup acting on radial
functions: on a two-point homogeneous space the smoothed function is
again radial about the same center, with value at distance rho given by
averaging the profile over geodesic spheres around the evaluation point.
The direction-cosine average uses Gauss-Jacobi nodes matched to the
sphere's cosine density, and spheres of indicator profiles are resolved
in closed form.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from ..errors import (InvalidInputError, NumericsError,
                      UnsupportedOracleError, UnsupportedReductionError)
from .functions import RadialIndicator

#: relative tail tolerance for the doubling window
TAIL_TOL = 1e-13

_MAX_DOUBLINGS = 40


def _quad(fun, a, b, points=None):
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b)
        pts = pts or None
    out = integrate.quad(fun, a, b, points=pts, limit=400,
                         epsabs=1e-15, epsrel=1e-12, full_output=1)
    val, abserr = out[0], out[1]
    if len(out) > 3 and abserr > max(1e-11, 1e-8 * abs(val)):
        raise NumericsError(
            f"quadrature did not converge on [{a:g}, {b:g}]",
            abserr=abserr, message=str(out[3]))
    return val


def radial_quadrature(geom, integrand, t, breakpoints=(), tail_tol=TAIL_TOL):
    """int_0^inf integrand(r) mu_t(r) A(r) dr for an exact-kernel geometry.

    ``breakpoints`` lists known discontinuities of the integrand (e.g.
    an indicator radius).  Raises NumericsError if the tail fails to die
    out within the doubling budget.
    """
    if not geom.has_exact_kernel:
        raise UnsupportedOracleError(
            f"{geom.gid} has no exact heat kernel to integrate against")
    if t <= 0:
        raise InvalidInputError(f"time must be positive, got {t}")

    def weighted(r):
        return float(integrand(r) * geom.radial_density(t, r)
                     * geom.sphere_area(r))

    hi = geom.bulk_radius(t)
    acc = _quad(weighted, 0.0, hi, points=breakpoints)
    lo = hi
    for _ in range(_MAX_DOUBLINGS):
        hi = 2.0 * lo
        seg = _quad(weighted, lo, hi, points=breakpoints)
        acc += seg
        if abs(seg) <= tail_tol * max(abs(acc), 1e-12):
            return acc
        lo = hi
    raise NumericsError(
        "radial quadrature tail did not converge",
        last_window=(lo / 2, lo), t=t, geometry=geom.gid)


def _cosine_density_beta(geom):
    """Exponent b such that the direction cosine u of a geodesic sphere
    has density proportional to (1 - u^2)^b."""
    if geom.gid == "hyperbolic3":
        return 0.0
    if geom.gid.startswith("euclidean:"):
        n = geom.dim
        if n == 1:
            return None  # two atoms, handled separately
        return (n - 3) / 2.0
    raise UnsupportedReductionError(
        f"{geom.gid} has no sphere-average decomposition")


@lru_cache(maxsize=32)
def _jacobi_nodes(beta, order=96):
    u, w = roots_jacobi(order, beta, beta)
    return u, w / w.sum()


def _chord_cos(geom, rho, r, d):
    """Direction cosine u with chord_distance(rho, r, u) = d."""
    if geom.gid == "hyperbolic3":
        return (math.cosh(rho) * math.cosh(r) - math.cosh(d)) \
            / (math.sinh(rho) * math.sinh(r))
    return (rho * rho + r * r - d * d) / (2.0 * rho * r)


def sphere_average(geom, profile, rho, r):
    """Average of profile(d(center, .)) over the sphere of radius r
    around a point at distance rho from the center."""
    if r <= 0:
        return float(np.asarray(profile(np.asarray([rho])))[0])
    if rho <= 1e-300:
        return float(np.asarray(profile(np.asarray([r])))[0])
    beta = _cosine_density_beta(geom)
    if beta is None:  # R^1: the sphere is two points
        vals = profile(np.asarray([abs(rho - r), rho + r]))
        return float(0.5 * (vals[0] + vals[1]))
    if isinstance(profile, RadialIndicator):
        # fraction of the sphere inside the ball of the indicator
        u_star = _chord_cos(geom, rho, r, profile.radius)
        if u_star <= -1.0:
            return 1.0
        if u_star >= 1.0:
            return 0.0
        if beta == 0.0:
            return (1.0 - u_star) / 2.0
        u, w = _jacobi_nodes(beta)
        return float(w[u >= u_star].sum())
    u, w = _jacobi_nodes(beta)
    d = geom.chord_distance(rho, r, u)
    return float(np.asarray(profile(d)) @ w)


def heat_op_radial(geom, profile, s, rho):
    """(e^{sL} f)(y) for f = profile(d(center, .)) and d(center, y) = rho.

    Valid on two-point homogeneous geometries, where the smoothed
    function is again radial about the center.
    """
    if s == 0:
        return float(np.asarray(profile(np.asarray([rho])))[0])
    breakpoints = ()
    if isinstance(profile, RadialIndicator):
        breakpoints = (abs(rho - profile.radius), rho + profile.radius)

    def integrand(r):
        return sphere_average(geom, profile, rho, r)

    return radial_quadrature(geom, integrand, s, breakpoints=breakpoints)


def lp_radial_norm(geom, profile, t, p, breakpoints=()):
    """|| profile(d(center, .)) ||_{L^p(mu_t^center)} by radial quadrature."""
    if not (p >= 1.0) or math.isinf(p):
        raise InvalidInputError(f"p must be finite and >= 1, got {p}")
    if isinstance(profile, RadialIndicator) and not breakpoints:
        breakpoints = (profile.radius,)

    def integrand(r):
        return np.abs(profile(r)) ** p

    val = radial_quadrature(geom, integrand, t, breakpoints=breakpoints)
    return val ** (1.0 / p)
