"""Euclidean space R^n with the Gaussian heat kernel."""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidInputError
from .base import Geometry


class Euclidean(Geometry):
    """R^n; the diffusion is standard Brownian motion (generator Delta/2)
    and the heat kernel is the Gaussian (2 pi t)^(-n/2) exp(-d^2 / 2t)."""

    has_exact_kernel = True
    chart = "cartesian"
    ricci_lower = 0.0
    default_scheme = "exact"

    def __init__(self, n):
        if not (isinstance(n, int) and n >= 1):
            raise InvalidInputError(f"dimension must be a positive int, got {n!r}")
        self.dim = n
        self.gid = f"euclidean:{n}"

    def origin(self):
        return np.zeros(self.dim)

    def distance(self, a, b):
        a = self.point(a)
        b = self.point(b)
        return float(np.linalg.norm(a - b))

    def distance_to_batch(self, a, pts):
        a = self.point(a)
        pts = np.asarray(pts, dtype=float)
        return np.linalg.norm(pts - a, axis=-1)

    def pair_distance(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return np.linalg.norm(a - b, axis=-1)

    def radial_density(self, t, r):
        if t <= 0:
            raise InvalidInputError(f"time must be positive, got {t}")
        r = np.asarray(r, dtype=float)
        n = self.dim
        return (2 * math.pi * t) ** (-n / 2) * np.exp(-r * r / (2 * t))

    def log_radial_density(self, t, r):
        if t <= 0:
            raise InvalidInputError(f"time must be positive, got {t}")
        r = np.asarray(r, dtype=float)
        val = -0.5 * self.dim * math.log(2 * math.pi * t) - r * r / (2 * t)
        return val if val.ndim else float(val)

    def sphere_area(self, r):
        n = self.dim
        r = np.asarray(r, dtype=float)
        c = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        return c * r ** (n - 1)

    def chord_distance(self, rho, r, u):
        return np.sqrt(np.maximum(rho * rho + r * r - 2 * rho * r * u, 0.0))

    def bulk_radius(self, t):
        return math.sqrt(self.dim * t) + 12 * math.sqrt(t)

    def sample_chunk(self, x0, t, n, dt, scheme, rng):
        x0 = self.point(x0)
        if t == 0:
            return np.tile(x0, (n, 1))
        # draws keep the path axis last so antithetic pairing mirrors paths
        if scheme == "exact":
            xi = rng.standard_normal((self.dim, n))
            return x0 + math.sqrt(t) * xi.T
        # Euler: same law, stepwise (kept for determinism experiments)
        steps, sdt = _step_grid(t, dt)
        pts = np.tile(x0, (n, 1))
        for k in range(steps):
            pts += sdt[k] * rng.standard_normal((self.dim, n)).T
        return pts

    def walk_chunk(self, x0, t, n, dt, rng, observer):
        x0 = self.point(x0)
        steps, sdt = _step_grid(t, dt)
        pts = np.tile(x0, (n, 1))
        for k in range(steps):
            pts += sdt[k] * rng.standard_normal((self.dim, n)).T
            observer(pts, k)
        return pts


def _step_grid(t, dt):
    """Number of steps and per-step sqrt(dt), absorbing a short last step."""
    if dt <= 0 or t <= 0:
        raise InvalidInputError("t and dt must be positive")
    steps = max(1, math.ceil(t / dt - 1e-9))
    base = t / steps
    return steps, np.full(steps, math.sqrt(base))
