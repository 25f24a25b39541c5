"""Hyperbolic 3-space in the upper half-space chart.

Points are (x1, x2, y) with y > 0, metric (dx1^2 + dx2^2 + dy^2) / y^2,
so the Laplace-Beltrami operator is y^2 Delta_{R^3} - y d/dy and the
Ricci curvature is constant -2.  The diffusion generated by half the
Laplacian has the closed-form radial kernel

    mu_t(r) = (2 pi t)^(-3/2) * (r / sinh r) * exp(-t/2 - r^2 / (2 t))

with respect to the Riemannian volume dx1 dx2 dy / y^3.  In these
coordinates log y is an exact drifted Brownian motion, d(log Y) =
dB - dt, which the Euler stepper exploits: only the horizontal
coordinates carry discretization error.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidInputError
from .base import Geometry
from .euclidean import _step_grid


class Hyperbolic3(Geometry):
    gid = "hyperbolic3"
    dim = 3
    chart = "half-space"
    has_exact_kernel = True
    ricci_lower = 2.0  # Ric = -2, so Ric >= -K with K = 2
    default_scheme = "euler"
    default_steps_per_unit_time = 2048

    def _check_point(self, a):
        if a[2] <= 0:
            raise InvalidInputError(
                f"half-space chart needs y > 0, got y = {a[2]}")

    def origin(self):
        return np.array([0.0, 0.0, 1.0])

    def distance(self, a, b):
        a = self.point(a)
        b = self.point(b)
        q = 1.0 + (np.sum((a[:2] - b[:2]) ** 2) + (a[2] - b[2]) ** 2) \
            / (2.0 * a[2] * b[2])
        return float(np.arccosh(max(q, 1.0)))

    def distance_to_batch(self, a, pts):
        a = self.point(a)
        pts = np.asarray(pts, dtype=float)
        q = 1.0 + (np.sum((pts[:, :2] - a[:2]) ** 2, axis=1)
                   + (pts[:, 2] - a[2]) ** 2) / (2.0 * a[2] * pts[:, 2])
        return np.arccosh(np.maximum(q, 1.0))

    def pair_distance(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        q = 1.0 + np.sum((a - b) ** 2, axis=-1) / (2.0 * a[..., 2] * b[..., 2])
        return np.arccosh(np.maximum(q, 1.0))

    def radial_density(self, t, r):
        if t <= 0:
            raise InvalidInputError(f"time must be positive, got {t}")
        r = np.asarray(r, dtype=float)
        ratio = np.where(r < 1e-6, 1.0 - r * r / 6.0,
                         r / np.sinh(np.where(r < 1e-6, 1.0, r)))
        val = (2 * math.pi * t) ** (-1.5) * ratio \
            * np.exp(-t / 2.0 - r * r / (2.0 * t))
        return val if val.ndim else float(val)

    def log_radial_density(self, t, r):
        if t <= 0:
            raise InvalidInputError(f"time must be positive, got {t}")
        r = np.asarray(r, dtype=float)
        # log(r / sinh r) = log r - r - log1p(-e^{-2r}) + log 2, which stays
        # finite however large r gets; quadratic series below r = 1e-6
        safe = np.where(r < 1e-6, 1.0, r)
        log_ratio = np.where(
            r < 1e-6, -r * r / 6.0,
            np.log(safe) - safe - np.log1p(-np.exp(-2.0 * safe)) + math.log(2))
        val = -1.5 * math.log(2 * math.pi * t) + log_ratio \
            - t / 2.0 - r * r / (2.0 * t)
        return val if val.ndim else float(val)

    def sphere_area(self, r):
        r = np.asarray(r, dtype=float)
        return 4 * math.pi * np.sinh(r) ** 2

    def chord_distance(self, rho, r, u):
        q = np.cosh(rho) * np.cosh(r) - np.sinh(rho) * np.sinh(r) * u
        return np.arccosh(np.maximum(q, 1.0))

    def bulk_radius(self, t):
        return t + 12 * math.sqrt(t) + 3.0

    def sample_chunk(self, x0, t, n, dt, scheme, rng):
        if scheme != "euler":
            from ..errors import UnsupportedOracleError
            raise UnsupportedOracleError(
                "hyperbolic3 has no exact endpoint sampler; use euler")
        x0 = self.point(x0)
        if t == 0:
            return np.tile(x0, (n, 1))
        steps, sdt = _step_grid(t, dt)
        base = t / steps
        x1 = np.full(n, x0[0])
        x2 = np.full(n, x0[1])
        u = np.full(n, math.log(x0[2]))
        for k in range(steps):
            xi = rng.standard_normal((3, n))
            y = np.exp(u)
            x1 += y * (sdt[k] * xi[0])
            x2 += y * (sdt[k] * xi[1])
            u += sdt[k] * xi[2] - base
        return np.column_stack([x1, x2, np.exp(u)])

    def walk_chunk(self, x0, t, n, dt, rng, observer):
        x0 = self.point(x0)
        steps, sdt = _step_grid(t, dt)
        base = t / steps
        x1 = np.full(n, x0[0])
        x2 = np.full(n, x0[1])
        u = np.full(n, math.log(x0[2]))
        for k in range(steps):
            xi = rng.standard_normal((3, n))
            y = np.exp(u)
            x1 += y * (sdt[k] * xi[0])
            x2 += y * (sdt[k] * xi[1])
            u += sdt[k] * xi[2] - base
            observer(np.column_stack([x1, x2, np.exp(u)]), k)
        return np.column_stack([x1, x2, np.exp(u)])
