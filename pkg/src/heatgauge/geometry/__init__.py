"""Model geometries: Euclidean space, hyperbolic 3-space, the first
Heisenberg group.

Geometries are addressed by id strings: ``"euclidean:n"`` (n >= 1),
``"hyperbolic3"``, ``"heisenberg"``.
"""

from __future__ import annotations

from functools import lru_cache

from ..errors import InvalidInputError
from .base import Geometry
from .euclidean import Euclidean
from .hyperbolic3 import Hyperbolic3
from .heisenberg import Heisenberg, multiply, inverse, dilate, \
    cc_distance_from_identity
from .functions import (
    TestFunction, Radial, Separable, RadialIndicator,
    HARMONIC, SUBHARMONIC, GENERIC,
    BOUNDED, POLYNOMIAL, EXPONENTIAL,
    catalog_functions, catalog_lookup, sample_points, verify_harmonicity,
    from_polynomial,
)
from .quadrature import (
    radial_quadrature, sphere_average, heat_op_radial, lp_radial_norm,
)

GEOMETRY_IDS = ("euclidean:n", "hyperbolic3", "heisenberg")


@lru_cache(maxsize=None)
def get_geometry(gid: str) -> Geometry:
    """Resolve a geometry id string to a geometry instance."""
    if not isinstance(gid, str):
        raise InvalidInputError(f"geometry id must be a string, got {gid!r}")
    if gid.startswith("euclidean:"):
        tail = gid.split(":", 1)[1]
        try:
            n = int(tail)
        except ValueError:
            raise InvalidInputError(f"bad euclidean dimension {tail!r}") \
                from None
        return Euclidean(n)
    if gid == "hyperbolic3":
        return Hyperbolic3()
    if gid == "heisenberg":
        return Heisenberg()
    raise InvalidInputError(
        f"unknown geometry {gid!r}; expected one of {GEOMETRY_IDS}")


def distance(gid_or_geom, a, b) -> float:
    geom = _resolve(gid_or_geom)
    return geom.distance(a, b)


def heat_kernel_density(gid_or_geom, t, a, b) -> float:
    """Exact heat-kernel density mu_t(a, b); raises UnsupportedOracleError
    for geometries without a closed form (the Heisenberg group)."""
    geom = _resolve(gid_or_geom)
    return geom.kernel_density(t, a, b)


def _resolve(gid_or_geom):
    if isinstance(gid_or_geom, Geometry):
        return gid_or_geom
    return get_geometry(gid_or_geom)


__all__ = [
    "Geometry", "Euclidean", "Hyperbolic3", "Heisenberg",
    "get_geometry", "distance", "heat_kernel_density",
    "multiply", "inverse", "dilate", "cc_distance_from_identity",
    "TestFunction", "Radial", "Separable", "RadialIndicator",
    "HARMONIC", "SUBHARMONIC", "GENERIC",
    "BOUNDED", "POLYNOMIAL", "EXPONENTIAL",
    "catalog_functions", "catalog_lookup", "sample_points",
    "verify_harmonicity", "from_polynomial",
    "radial_quadrature", "sphere_average", "heat_op_radial",
    "lp_radial_norm",
]
