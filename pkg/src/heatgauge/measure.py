"""Finite-state measures, Markov kernels, and the L^p contraction check.

The continuous statement "integrating against a Markov kernel contracts
L^p norms" has an exact finite analogue: if ``k`` is a row-stochastic
matrix, ``nu1`` a finite measure on the row space and ``nu2`` its
pushforward through ``k``, then for every function ``f`` on the column
space and every p >= 1,

    || k f ||_{L^p(nu1)}  <=  || f ||_{L^p(nu2)}.

Everything here is plain double-precision linear algebra, so the check
carries a 1e-12 slack and nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .reports import InequalityReport

#: row sums of a kernel may deviate from 1 by at most this much
STOCHASTIC_TOL = 1e-12

#: slack added to the right-hand side of the finite contraction check
CONTRACTION_TOL = 1e-12


def _as_1d(values, name):
    a = np.asarray(values, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise InvalidInputError(f"{name} must be a nonempty 1-d array")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class FiniteMeasure:
    """Nonnegative weights on n points with positive, finite total mass."""

    weights: np.ndarray

    def __post_init__(self):
        w = _as_1d(self.weights, "weights")
        if np.any(w < 0):
            raise InvalidInputError("measure weights must be nonnegative")
        if w.sum() <= 0:
            raise InvalidInputError("measure must have positive total mass")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def total(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class FiniteFunction:
    """Real values on n points."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_1d(self.values, "values"))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class FiniteKernel:
    """A family of probability measures mu^x, one per source point.

    ``rows[x, y]`` is the mass the kernel at source x puts on target y.
    Rows must be nonnegative and sum to 1 within ``STOCHASTIC_TOL``.
    """

    rows: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rows, dtype=float)
        if r.ndim != 2 or r.size == 0:
            raise InvalidInputError("kernel rows must form a nonempty 2-d array")
        if not np.all(np.isfinite(r)):
            raise InvalidInputError("kernel contains non-finite entries")
        if np.any(r < 0):
            raise InvalidInputError("kernel entries must be nonnegative")
        err = np.abs(r.sum(axis=1) - 1.0)
        if np.any(err > STOCHASTIC_TOL):
            raise InvalidInputError(
                "kernel rows must be stochastic: worst row-sum deviation "
                f"{err.max():.3e} exceeds {STOCHASTIC_TOL:.0e}")
        object.__setattr__(self, "rows", r)

    @property
    def n_source(self) -> int:
        return self.rows.shape[0]

    @property
    def n_target(self) -> int:
        return self.rows.shape[1]


def pushforward(kernel: FiniteKernel, nu: FiniteMeasure) -> FiniteMeasure:
    """The measure nu2(y) = sum_x mu^x(y) nu(x) on the target space."""
    if nu.n != kernel.n_source:
        raise InvalidInputError(
            f"measure has {nu.n} points but kernel has {kernel.n_source} rows")
    return FiniteMeasure(kernel.rows.T @ nu.weights)


def apply_kernel(kernel: FiniteKernel, f: FiniteFunction) -> FiniteFunction:
    """The function (A f)(x) = integral of f against mu^x."""
    if f.n != kernel.n_target:
        raise InvalidInputError(
            f"function has {f.n} points but kernel has {kernel.n_target} columns")
    return FiniteFunction(kernel.rows @ f.values)


def compose_kernels(k1: FiniteKernel, k2: FiniteKernel) -> FiniteKernel:
    """Kernel of the two-step walk: first k1, then k2."""
    if k1.n_target != k2.n_source:
        raise InvalidInputError(
            f"cannot compose: k1 has {k1.n_target} columns, k2 has "
            f"{k2.n_source} rows")
    return FiniteKernel(k1.rows @ k2.rows)


def lp_norm(f: FiniteFunction, nu: FiniteMeasure, p: float) -> float:
    """|| f ||_{L^p(nu)} for p in [1, inf].

    For p = inf this is the essential supremum: points where nu puts no
    mass are ignored.
    """
    if f.n != nu.n:
        raise InvalidInputError(
            f"function has {f.n} points but measure has {nu.n}")
    if not (p >= 1.0):
        raise InvalidInputError(f"p must be >= 1, got {p}")
    av = np.abs(f.values)
    if math.isinf(p):
        charged = nu.weights > 0
        return float(av[charged].max())
    return float((av ** p @ nu.weights) ** (1.0 / p))


def integral(f: FiniteFunction, nu: FiniteMeasure) -> float:
    """Plain integral of f against nu."""
    if f.n != nu.n:
        raise InvalidInputError(
            f"function has {f.n} points but measure has {nu.n}")
    return float(f.values @ nu.weights)


def check_contraction(kernel: FiniteKernel, nu1: FiniteMeasure,
                      f: FiniteFunction, p: float) -> InequalityReport:
    """Check || A f ||_{L^p(nu1)} <= || f ||_{L^p(pushforward(nu1))}.

    Both sides are exact arithmetic, so the report verdict is PASS-exact
    or FAIL with an absolute slack of ``CONTRACTION_TOL``.
    """
    nu2 = pushforward(kernel, nu1)
    lhs = lp_norm(apply_kernel(kernel, f), nu1, p)
    rhs = lp_norm(f, nu2, p)
    return InequalityReport.from_sides(
        "kernel-contraction", lhs, rhs, tol=CONTRACTION_TOL,
        suite="finite-sweep", x=p if math.isfinite(p) else -1.0,
        provenance={"n_source": kernel.n_source, "n_target": kernel.n_target,
                    "p": repr(p)})


#: the p grid used by random sweeps
SWEEP_P_VALUES = (1.0, 1.5, 2.0, 3.0, 10.0, math.inf)


def random_instance(rng, max_points=10):
    """Draw a random (kernel, measure, function) triple.

    Kernel rows and the measure are uniform(0, 1) draws normalized to sum
    to one; function values are uniform on [-1, 1].  Point counts are
    uniform on {1, ..., max_points} and the two spaces may differ in size.
    """
    n_x = int(rng.integers(1, max_points + 1))
    n_y = int(rng.integers(1, max_points + 1))
    rows = rng.uniform(0.0, 1.0, size=(n_x, n_y)) + 1e-12
    rows /= rows.sum(axis=1, keepdims=True)
    w = rng.uniform(0.0, 1.0, size=n_x) + 1e-12
    w /= w.sum()
    f = rng.uniform(-1.0, 1.0, size=n_y)
    return FiniteKernel(rows), FiniteMeasure(w), FiniteFunction(f)


def contraction_sweep(n_instances=1000, seed=0, p_values=SWEEP_P_VALUES,
                      max_points=10):
    """Run the contraction check on random instances at each p.

    Returns a dict with the worst contraction margin per p, the worst
    mass-conservation error and the worst duality-identity error across
    the sweep.  Used by the finite-sweep suite and the acceptance test.
    """
    rng = np.random.default_rng(seed)
    worst_margin = {p: math.inf for p in p_values}
    worst_pair = {p: (0.0, 0.0) for p in p_values}
    worst_mass = 0.0
    worst_duality = 0.0
    for _ in range(n_instances):
        kernel, nu1, f = random_instance(rng, max_points=max_points)
        nu2 = pushforward(kernel, nu1)
        worst_mass = max(worst_mass, abs(nu2.total - nu1.total))
        lhs = integral(apply_kernel(kernel, f), nu1)
        rhs = integral(f, nu2)
        worst_duality = max(worst_duality, abs(lhs - rhs))
        for p in p_values:
            rep = check_contraction(kernel, nu1, f, p)
            if rep.margin < worst_margin[p]:
                worst_margin[p] = rep.margin
                worst_pair[p] = (rep.lhs, rep.rhs)
    return {"worst_margin": worst_margin, "worst_pair": worst_pair,
            "worst_mass_error": worst_mass,
            "worst_duality_error": worst_duality,
            "n_instances": n_instances, "seed": seed}
