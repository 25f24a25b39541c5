"""Geometry protocol shared by the model spaces.

A geometry bundles a chart, a distance, an SDE stepper for the canonical
diffusion (generator one half of the Laplacian / sub-Laplacian) and, when
one exists in closed form, the heat-kernel density.  Densities are taken
with respect to the invariant volume of the space and the kernels are
radial: ``radial_density(t, r)`` is the density at distance r from the
start point after time t.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError, UnsupportedOracleError


class Geometry:
    #: registry id, e.g. "euclidean:3"
    gid = ""
    #: chart dimension (number of coordinates of a Point)
    dim = 0
    #: human-readable chart note carried into report provenance
    chart = ""
    #: True when an exact heat-kernel density is available
    has_exact_kernel = False
    #: K >= 0 such that the Ricci curvature is bounded below by -K,
    #: or None when no Ricci bound applies (sub-Riemannian case)
    ricci_lower = None
    #: default endpoint sampling scheme
    default_scheme = "euler"
    #: default number of Euler steps over a unit of diffusion time
    default_steps_per_unit_time = 256

    # -- points ---------------------------------------------------------
    def point(self, p) -> np.ndarray:
        """Validate and return a chart point as a float array."""
        a = np.asarray(p, dtype=float)
        if a.shape != (self.dim,):
            raise InvalidInputError(
                f"{self.gid} points have {self.dim} coordinates, got "
                f"shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("point has non-finite coordinates")
        self._check_point(a)
        return a

    def _check_point(self, a):
        pass

    def origin(self) -> np.ndarray:
        raise NotImplementedError

    # -- metric ----------------------------------------------------------
    def distance(self, a, b) -> float:
        raise NotImplementedError

    def distance_to_batch(self, a, pts) -> np.ndarray:
        """Distances from a single point to an (m, dim) batch."""
        a = self.point(a)
        pts = np.asarray(pts, dtype=float)
        return np.array([self.distance(a, q) for q in pts])

    def pair_distance(self, a, b) -> np.ndarray:
        """Elementwise distances between two (m, dim) batches."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return np.array([self.distance(p, q) for p, q in zip(a, b)])

    # -- exact kernel ------------------------------------------------------
    def radial_density(self, t, r):
        raise UnsupportedOracleError(
            f"{self.gid} has no closed-form heat kernel")

    def log_radial_density(self, t, r):
        """log of radial_density, stable for large r."""
        raise UnsupportedOracleError(
            f"{self.gid} has no closed-form heat kernel")

    def sphere_area(self, r):
        """Area of the geodesic sphere of radius r."""
        raise UnsupportedOracleError(
            f"{self.gid} has no radial volume decomposition here")

    def chord_distance(self, rho, r, u):
        """Distance from the base point of a point at distance r from y,
        where d(base, y) = rho and u is the direction cosine at y."""
        raise UnsupportedOracleError(
            f"{self.gid} has no two-point chord formula here")

    def kernel_density(self, t, a, b) -> float:
        """Heat kernel density mu_t(a, b) against the invariant volume."""
        if t <= 0:
            raise InvalidInputError(f"time must be positive, got {t}")
        return float(self.radial_density(t, self.distance(a, b)))

    # -- sampling ----------------------------------------------------------
    def default_dt(self, t) -> float:
        return t / self.default_steps_per_unit_time

    def sample_chunk(self, x0, t, n, dt, scheme, rng) -> np.ndarray:
        """Draw n endpoints of the diffusion started at x0 run for time t.

        Consumes the generator in a deterministic order; callers are
        responsible for seeding one independent generator per chunk.
        """
        raise NotImplementedError

    def walk_chunk(self, x0, t, n, dt, rng, observer):
        """Step n paths to time t, calling observer(state, k) after every
        step; used by exit-time probes.  Returns the endpoints."""
        raise UnsupportedOracleError(
            f"{self.gid} has no path-walking sampler")

    def __repr__(self):
        return f"<{type(self).__name__} {self.gid}>"
