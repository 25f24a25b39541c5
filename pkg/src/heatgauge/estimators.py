"""Estimators of heat-semigroup quantities with standard errors.

Two routes to the same numbers:

* quadrature against an exact kernel, when the function declares a
  reduction the kernel can use (stderr 0);
* Monte Carlo over endpoint batches, with the sample standard error
  (delta method for norms).

Keeping both routes alive is the point: the inequality suites compare
them against each other before trusting either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .diffusion import EndpointBatch, SimConfig, load_or_simulate
from .errors import (
    InvalidInputError, NumericsError, UnsupportedReductionError,
)
from .geometry import get_geometry
from .geometry.base import Geometry
from .geometry.functions import Radial, RadialIndicator, Separable
from .geometry.quadrature import heat_op_radial, radial_quadrature

QUAD_WINDOW = 12.0  # +- standard deviations kept by the axis integrals


@dataclass(frozen=True)
class Estimate:
    """A number plus how it was obtained and how uncertain it is."""

    value: float
    stderr: float
    method: str            # "exact" | "quadrature" | "mc"
    n: int = 0
    meta: dict = field(default_factory=dict)


def _resolve(geom_or_id) -> Geometry:
    if isinstance(geom_or_id, Geometry):
        return geom_or_id
    return get_geometry(geom_or_id)


def _check_p(p):
    if math.isinf(p):
        raise UnsupportedReductionError(
            "p = inf needs an essential-supremum oracle; use finite p")
    if not p >= 1.0:
        raise InvalidInputError(f"p must be >= 1, got {p}")


def _growth_tag(f):
    return getattr(f, "growth", "unknown")


def _fname(f):
    return getattr(f, "name", getattr(f, "__name__", repr(f)))


# ------------------------------------------------------------ Monte Carlo

def heat_op_mc(f, batch: EndpointBatch) -> Estimate:
    """(e^{tL} f)(x0) as the sample mean over endpoint batch."""
    vals = np.asarray(f(batch.points), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericsError(
            f"{_fname(f)} overflowed on {batch.geometry_id} endpoints "
            f"({_growth_tag(f)} growth)",
            t=batch.t, n=batch.n)
    se = float(vals.std(ddof=1)) / math.sqrt(batch.n) if batch.n > 1 else 0.0
    return Estimate(float(vals.mean()), se, "mc", batch.n,
                    {"dt": batch.dt, "scheme": batch.scheme})


def lp_norm_mc(f, batch: EndpointBatch, p) -> Estimate:
    """||f||_{L^p(mu_t^x0)} over an endpoint batch, delta-method stderr."""
    _check_p(p)
    vals = np.asarray(f(batch.points), dtype=float)
    with np.errstate(over="raise"):
        try:
            q = np.abs(vals) ** p
        except FloatingPointError:
            q = np.full(1, np.inf)
    if not np.all(np.isfinite(q)):
        raise NumericsError(
            f"|{_fname(f)}|^{p} overflowed on {batch.geometry_id} endpoints "
            f"({_growth_tag(f)} growth); reduce p or t",
            p=p, t=batch.t)
    m = float(q.mean())
    if m == 0.0:
        return Estimate(0.0, 0.0, "mc", batch.n, {"p": p, "moment": 0.0})
    se_m = float(q.std(ddof=1)) / math.sqrt(batch.n) if batch.n > 1 else 0.0
    norm = m ** (1.0 / p)
    se = m ** (1.0 / p - 1.0) * se_m / p
    return Estimate(norm, se, "mc", batch.n, {"p": p, "moment": m})


# ------------------------------------------------------------- quadrature

def _axis_integral(profile, center, t, p=None):
    """integral of profile(center + sqrt(t) w) dPhi(w), optionally of its
    absolute p-th power, over the standard Gaussian weight."""
    s = math.sqrt(t)

    def g(w):
        v = profile(center + s * w)
        if p is not None:
            v = abs(v) ** p
        return v * math.exp(-0.5 * w * w) / math.sqrt(2.0 * math.pi)

    with np.errstate(over="ignore"):  # divergence is reported below
        val, err = integrate.quad(g, -QUAD_WINDOW, QUAD_WINDOW,
                                  limit=200, epsabs=1e-14, epsrel=1e-12)
    if not math.isfinite(val):
        raise NumericsError("axis integral diverged",
                            center=center, t=t, p=p)
    return val


def _separable_terms(f):
    red = getattr(f, "reduction", None)
    if not isinstance(red, Separable):
        return None
    return red.terms


def heat_op_quadrature(geom, f, x, t) -> Estimate:
    """(e^{tL} f)(x) against the exact kernel; needs a usable reduction."""
    geom = _resolve(geom)
    x = geom.point(x)
    if t == 0:
        return Estimate(float(f(x)), 0.0, "exact")
    red = getattr(f, "reduction", None)
    if isinstance(red, Separable) and geom.gid.startswith("euclidean:"):
        total = 0.0
        for coeff, factors in red.terms:
            prod = coeff
            for axis, profile in factors:
                prod *= _axis_integral(profile, x[axis], t)
            total += prod
        return Estimate(float(total), 0.0, "quadrature",
                        meta={"reduction": "separable"})
    if isinstance(red, Radial):
        rho = geom.distance(red.center, x)
        val = heat_op_radial(geom, red.profile, t, rho)
        return Estimate(float(val), 0.0, "quadrature",
                        meta={"reduction": "radial", "rho": rho})
    raise UnsupportedReductionError(
        f"{_fname(f)} has no quadrature reduction usable on {geom.gid}")


def lp_norm_quadrature(geom, f, x, T, p) -> Estimate:
    """||f||_{L^p(mu_T^x)} against the exact kernel."""
    geom = _resolve(geom)
    x = geom.point(x)
    _check_p(p)
    if T == 0:
        return Estimate(abs(float(f(x))), 0.0, "exact")
    red = getattr(f, "reduction", None)
    if isinstance(red, Radial):
        rho = geom.distance(red.center, x)
        prof = red.profile
        if not isinstance(prof, RadialIndicator):
            base = prof
            prof = lambda r: np.abs(base(r)) ** p
        mass = heat_op_radial(geom, prof, T, rho)
        return Estimate(float(mass) ** (1.0 / p), 0.0, "quadrature",
                        meta={"reduction": "radial", "p": p, "rho": rho})
    if isinstance(red, Separable) and geom.gid.startswith("euclidean:"):
        if len(red.terms) != 1:
            raise UnsupportedReductionError(
                f"|{_fname(f)}|^p does not factorize: {len(red.terms)} "
                "summands")
        coeff, factors = red.terms[0]
        moment = abs(coeff) ** p
        for axis, profile in factors:
            moment *= _axis_integral(profile, x[axis], T, p=p)
        return Estimate(moment ** (1.0 / p), 0.0, "quadrature",
                        meta={"reduction": "separable", "p": p,
                              "moment": moment})
    raise UnsupportedReductionError(
        f"no quadrature route for ||{_fname(f)}||_p on {geom.gid}")


# --------------------------------------------------------------- dispatch

def _quadrature_usable(geom, f, for_norm):
    if not geom.has_exact_kernel:
        return False
    red = getattr(f, "reduction", None)
    if isinstance(red, Radial):
        return True
    if isinstance(red, Separable) and geom.gid.startswith("euclidean:"):
        return len(red.terms) == 1 if for_norm else True
    return False


def _mc_batch(geom, x, t, cfg, cache_dir):
    if cfg is None:
        raise InvalidInputError(
            "Monte Carlo route needs a SimConfig (no quadrature reduction "
            "applies)")
    return load_or_simulate(geom, x, t, cfg, cache_dir=cache_dir)


def heat_op(geom, f, x, t, method=None, cfg: SimConfig | None = None,
            cache_dir=None) -> Estimate:
    """(e^{tL} f)(x), choosing quadrature when the kernel supports it."""
    geom = _resolve(geom)
    if t == 0:
        return Estimate(float(f(geom.point(x))), 0.0, "exact")
    if method is None:
        method = ("quadrature" if _quadrature_usable(geom, f, False)
                  else "mc")
    if method == "quadrature":
        return heat_op_quadrature(geom, f, x, t)
    if method == "mc":
        return heat_op_mc(f, _mc_batch(geom, x, t, cfg, cache_dir))
    raise InvalidInputError(f"unknown method {method!r}")


def lp_norm(geom, f, x, T, p, method=None, cfg: SimConfig | None = None,
            cache_dir=None) -> Estimate:
    """||f||_{L^p(mu_T^x)}, choosing quadrature when the kernel supports
    it."""
    geom = _resolve(geom)
    _check_p(p)
    if T == 0:
        return Estimate(abs(float(f(geom.point(x)))), 0.0, "exact")
    if method is None:
        method = ("quadrature" if _quadrature_usable(geom, f, True)
                  else "mc")
    if method == "quadrature":
        return lp_norm_quadrature(geom, f, x, T, p)
    if method == "mc":
        return lp_norm_mc(f, _mc_batch(geom, x, T, cfg, cache_dir), p)
    raise InvalidInputError(f"unknown method {method!r}")


def kernel_mass(geom, x, t, radius) -> Estimate:
    """mu_t^x(ball(x, radius)) by radial quadrature (exact kernels only)."""
    geom = _resolve(geom)
    ind = RadialIndicator(radius)
    val = radial_quadrature(geom, lambda r: ind(r), t,
                            breakpoints=(radius,))
    return Estimate(float(val), 0.0, "quadrature", meta={"radius": radius})
