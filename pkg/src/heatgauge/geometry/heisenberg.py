"""The first Heisenberg group in exponential coordinates.

Points are (x, y, z) with the group law

    (x, y, z) * (x', y', z') = (x + x', y + y', z + z' + (x y' - y x')/2),

left-invariant horizontal frame Y1 = d/dx - (y/2) d/dz and
Y2 = d/dy + (x/2) d/dz, and dilations (x, y, z) -> (lx, ly, l^2 z).
The Carnot-Caratheodory distance from the identity has the classical
arc parametrization: writing r^2 = x^2 + y^2, the geodesic to (x, y, z)
with z != 0 lifts a circular arc of opening angle 2a, where a in (0, pi)
solves

    mu(a) = (a - sin a cos a) / sin^2 a = 4 |z| / r^2,

and d = a r / sin a.  The purely vertical distance is the isoperimetric
value d((0,0,0), (0,0,z)) = 2 sqrt(pi |z|).  mu is strictly increasing,
so the solve below is a plain vectorized bisection with a residual check.

There is no closed-form heat kernel here; the canonical diffusion
(generator (Y1^2 + Y2^2)/2) is sampled by exact Gaussian increments in
(x, y) with the midpoint (Stratonovich = Ito here) rule for z.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidInputError, NumericsError, UnsupportedOracleError
from ..gamma_calculus import HEISENBERG_CD
from .base import Geometry
from .euclidean import _step_grid


def multiply(a, b):
    """Group product; accepts (..., 3) arrays and broadcasts."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 0] + b[..., 0]
    out[..., 1] = a[..., 1] + b[..., 1]
    out[..., 2] = a[..., 2] + b[..., 2] \
        + 0.5 * (a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0])
    return out


def inverse(a):
    """Group inverse, which in exponential coordinates is negation."""
    return -np.asarray(a, dtype=float)


def dilate(lam, a):
    """The anisotropic dilation (x, y, z) -> (l x, l y, l^2 z)."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    out[..., 0] = lam * a[..., 0]
    out[..., 1] = lam * a[..., 1]
    out[..., 2] = lam * lam * a[..., 2]
    return out


def _mu(alpha):
    """(alpha - sin alpha cos alpha) / sin^2 alpha, stable near 0."""
    alpha = np.asarray(alpha, dtype=float)
    small = alpha < 1e-4
    safe = np.where(small, 1.0, alpha)
    s = np.sin(safe)
    series = 2.0 * alpha / 3.0 + 4.0 * alpha ** 3 / 45.0
    return np.where(small, series, (safe - s * np.cos(safe)) / (s * s))


# m values beyond this are effectively vertical; the asymptotic expansion
# d = 2 sqrt(pi |z|) - r is then accurate to relative 1e-12
_VERTICAL_M = 1e12


def cc_distance_from_identity(pts):
    """Carnot-Caratheodory distance of (..., 3) points from the identity."""
    pts = np.asarray(pts, dtype=float)
    if pts.shape[-1] != 3:
        raise InvalidInputError("points must have 3 coordinates")
    if not np.all(np.isfinite(pts)):
        raise InvalidInputError("point has non-finite coordinates")
    flat = pts.reshape(-1, 3)
    x, y, z = flat[:, 0], flat[:, 1], flat[:, 2]
    r2 = x * x + y * y
    r = np.sqrt(r2)
    az = np.abs(z)
    d = np.array(r)  # covers the z == 0 case

    vertical = (r2 == 0.0) & (az > 0.0)
    d[vertical] = 2.0 * np.sqrt(math.pi * az[vertical])

    general = (r2 > 0.0) & (az > 0.0)
    if np.any(general):
        m = 4.0 * az[general] / r2[general]
        near_vert = m > _VERTICAL_M
        alpha = _solve_mu(m[~near_vert])
        dg = np.empty(m.shape)
        rg = r[general]
        dg[~near_vert] = alpha * rg[~near_vert] / np.sin(alpha)
        dg[near_vert] = 2.0 * np.sqrt(math.pi * az[general][near_vert]) \
            - rg[near_vert]
        d[general] = dg
    return d.reshape(pts.shape[:-1])


def _solve_mu(m):
    """Solve mu(alpha) = m on (0, pi) by bisection, elementwise."""
    if m.size == 0:
        return m
    lo = np.zeros_like(m)
    hi = np.full_like(m, math.pi)
    for _ in range(72):
        mid = 0.5 * (lo + hi)
        below = _mu(mid) <= m
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    alpha = 0.5 * (lo + hi)
    resid = np.abs(_mu(alpha) - m) / np.maximum(1.0, m)
    worst = float(resid.max())
    if not np.isfinite(worst) or worst > 1e-9:
        raise NumericsError("geodesic angle solve did not converge",
                            residual=worst)
    return alpha


class Heisenberg(Geometry):
    gid = "heisenberg"
    dim = 3
    chart = "exponential"
    has_exact_kernel = False
    ricci_lower = None
    default_scheme = "euler"
    default_steps_per_unit_time = 1024

    #: generalized curvature-dimension parameters (convention c = 1)
    cd_params = HEISENBERG_CD

    def origin(self):
        return np.zeros(3)

    def distance(self, a, b):
        a = self.point(a)
        b = self.point(b)
        return float(cc_distance_from_identity(multiply(inverse(a), b)))

    def distance_to_batch(self, a, pts):
        a = self.point(a)
        pts = np.asarray(pts, dtype=float)
        return cc_distance_from_identity(multiply(inverse(a), pts))

    def sample_chunk(self, x0, t, n, dt, scheme, rng):
        if scheme != "euler":
            raise UnsupportedOracleError(
                "exact simulation of the vertical area is not available; "
                "use euler")
        x0 = self.point(x0)
        if t == 0:
            return np.tile(x0, (n, 1))
        steps, sdt = _step_grid(t, dt)
        x = np.full(n, x0[0])
        y = np.full(n, x0[1])
        z = np.full(n, x0[2])
        for k in range(steps):
            xi = rng.standard_normal((2, n))
            db1 = sdt[k] * xi[0]
            db2 = sdt[k] * xi[1]
            z += 0.5 * ((x + 0.5 * db1) * db2 - (y + 0.5 * db2) * db1)
            x += db1
            y += db2
        return np.column_stack([x, y, z])

    def walk_chunk(self, x0, t, n, dt, rng, observer):
        x0 = self.point(x0)
        steps, sdt = _step_grid(t, dt)
        x = np.full(n, x0[0])
        y = np.full(n, x0[1])
        z = np.full(n, x0[2])
        for k in range(steps):
            xi = rng.standard_normal((2, n))
            db1 = sdt[k] * xi[0]
            db2 = sdt[k] * xi[1]
            z += 0.5 * ((x + 0.5 * db1) * db2 - (y + 0.5 * db2) * db1)
            x += db1
            y += db2
            observer(np.column_stack([x, y, z]), k)
        return np.column_stack([x, y, z])
