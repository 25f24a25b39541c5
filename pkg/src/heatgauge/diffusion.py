"""Endpoint sampling of the canonical diffusions.

Paths are sampled in fixed-size chunks; chunk c of a run seeded with s
uses its own counter-based generator keyed by (s, c), and results are
assembled in chunk order.  Endpoints are therefore bitwise reproducible
for a given (seed, chunk_size) regardless of how many worker threads the
``HEATGAUGE_THREADS`` environment variable allows.

``simulate_coupled`` runs a coarse and a fine discretization of the same
Brownian path (the coarse step consumes the sum of two fine increments),
which turns weak-bias Richardson checks into low-variance paired
estimates.
"""

from __future__ import annotations

import hashlib
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CacheFormatError, InvalidInputError
from .geometry import get_geometry
from .geometry.base import Geometry

CACHE_MAGIC = b"HGEB"
CACHE_VERSION = 1


def thread_count() -> int:
    """Worker threads for chunked sampling, capped by HEATGAUGE_THREADS."""
    raw = os.environ.get("HEATGAUGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidInputError(
            f"HEATGAUGE_THREADS must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class SimConfig:
    """Knobs of an endpoint sampling run.

    ``dt`` and ``scheme`` default to the geometry's choices (dt = t/2048
    on hyperbolic 3-space, t/1024 on the Heisenberg group); ``dt`` is
    ignored by the exact Gaussian sampler.  ``antithetic`` pairs each
    path with its sign-flipped driver inside the chunk.
    """

    n_paths: int
    seed: int = 0
    dt: float | None = None
    scheme: str | None = None
    chunk_size: int = 65536
    antithetic: bool = False

    def __post_init__(self):
        if not (isinstance(self.n_paths, int) and self.n_paths >= 1):
            raise InvalidInputError(f"n_paths must be >= 1, got {self.n_paths!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise InvalidInputError("seed must be a u64")
        if self.dt is not None and not self.dt > 0:
            raise InvalidInputError(f"dt must be positive, got {self.dt!r}")
        if self.scheme not in (None, "exact", "euler"):
            raise InvalidInputError(f"unknown scheme {self.scheme!r}")
        if self.chunk_size < 2:
            raise InvalidInputError("chunk_size must be at least 2")


@dataclass
class EndpointBatch:
    """Endpoints of n diffusion paths at a single time."""

    geometry_id: str
    start: np.ndarray
    t: float
    points: np.ndarray
    seed: int
    dt: float          # 0.0 for the exact sampler
    scheme: str

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise InvalidInputError("endpoint payload must be (n, dim)")
        if not np.all(np.isfinite(self.points)):
            raise InvalidInputError("endpoint payload has non-finite values")
        if self.geometry_id == "hyperbolic3" and np.any(self.points[:, 2] <= 0):
            raise InvalidInputError("hyperbolic endpoints left the chart")

    @property
    def n(self) -> int:
        return self.points.shape[0]


class _AntitheticGen:
    """Wraps a generator so the second half of each draw along the path
    axis mirrors the first half."""

    def __init__(self, rng):
        self._rng = rng

    def standard_normal(self, shape):
        half = shape[:-1] + (shape[-1] // 2,)
        xi = self._rng.standard_normal(half)
        return np.concatenate([xi, -xi], axis=-1)


def _chunk_rng(seed, chunk_index, antithetic):
    key = np.array([seed, chunk_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return _AntitheticGen(rng) if antithetic else rng


def _chunk_sizes(n, chunk_size, antithetic):
    if antithetic and chunk_size % 2:
        chunk_size += 1
    sizes = []
    left = n
    while left > 0:
        take = min(chunk_size, left)
        if antithetic and take % 2:
            take += 1  # rounded up, trimmed after sampling
        sizes.append(take)
        left -= take
    return sizes


def _resolve(geom_or_id):
    if isinstance(geom_or_id, Geometry):
        return geom_or_id
    return get_geometry(geom_or_id)


def _run_chunks(fn, n_chunks):
    workers = thread_count()
    if workers == 1 or n_chunks == 1:
        return [fn(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_chunks)))


def simulate(geom, x0, t, cfg: SimConfig) -> EndpointBatch:
    """Sample cfg.n_paths endpoints of the diffusion from x0 at time t."""
    geom = _resolve(geom)
    x0 = geom.point(x0)
    if t < 0:
        raise InvalidInputError(f"time must be nonnegative, got {t}")
    scheme = cfg.scheme or geom.default_scheme
    dt = 0.0
    if scheme != "exact" and t > 0:
        dt = cfg.dt if cfg.dt is not None else geom.default_dt(t)
    sizes = _chunk_sizes(cfg.n_paths, cfg.chunk_size, cfg.antithetic)

    def one_chunk(c):
        rng = _chunk_rng(cfg.seed, c, cfg.antithetic)
        return geom.sample_chunk(x0, t, sizes[c], dt or t, scheme, rng)

    parts = _run_chunks(one_chunk, len(sizes))
    pts = np.vstack(parts)[:cfg.n_paths]
    return EndpointBatch(geometry_id=geom.gid, start=x0, t=float(t),
                         points=pts, seed=cfg.seed, dt=dt, scheme=scheme)


def simulate_coupled(geom, x0, t, cfg: SimConfig):
    """Sample (fine, coarse) endpoint batches driven by the same Brownian
    increments, with the coarse leg using steps of 2 dt.

    Returns a pair of EndpointBatch with matched path indices.
    """
    geom = _resolve(geom)
    x0 = geom.point(x0)
    if not t > 0:
        raise InvalidInputError("coupled sampling needs t > 0")
    dt = cfg.dt if cfg.dt is not None else geom.default_dt(t)
    # the fine grid must pair up evenly
    half_steps = max(1, math.ceil(t / (2.0 * dt) - 1e-9))
    dt_fine = t / (2 * half_steps)
    sizes = _chunk_sizes(cfg.n_paths, cfg.chunk_size, cfg.antithetic)

    def one_chunk(c):
        rng = _chunk_rng(cfg.seed, c, cfg.antithetic)
        return _coupled_chunk(geom, x0, t, sizes[c], dt_fine, rng)

    parts = _run_chunks(one_chunk, len(sizes))
    fine = np.vstack([p[0] for p in parts])[:cfg.n_paths]
    coarse = np.vstack([p[1] for p in parts])[:cfg.n_paths]
    mk = lambda pts, d: EndpointBatch(
        geometry_id=geom.gid, start=x0, t=float(t), points=pts,
        seed=cfg.seed, dt=d, scheme="euler")
    return mk(fine, dt_fine), mk(coarse, 2 * dt_fine)


def _coupled_chunk(geom, x0, t, n, dt_fine, rng):
    """Advance fine (dt) and coarse (2 dt) states on shared increments."""
    gid = geom.gid
    half_steps = round(t / (2 * dt_fine))
    sdt = math.sqrt(dt_fine)
    if gid == "heisenberg":
        xf = np.full(n, x0[0]); yf = np.full(n, x0[1]); zf = np.full(n, x0[2])
        xc, yc, zc = xf.copy(), yf.copy(), zf.copy()
        for _ in range(half_steps):
            xi = rng.standard_normal((2, 2, n))
            for sub in range(2):
                db1 = sdt * xi[sub, 0]
                db2 = sdt * xi[sub, 1]
                zf += 0.5 * ((xf + 0.5 * db1) * db2 - (yf + 0.5 * db2) * db1)
                xf += db1
                yf += db2
            D1 = sdt * (xi[0, 0] + xi[1, 0])
            D2 = sdt * (xi[0, 1] + xi[1, 1])
            zc += 0.5 * ((xc + 0.5 * D1) * D2 - (yc + 0.5 * D2) * D1)
            xc += D1
            yc += D2
        return (np.column_stack([xf, yf, zf]), np.column_stack([xc, yc, zc]))
    if gid == "hyperbolic3":
        x1f = np.full(n, x0[0]); x2f = np.full(n, x0[1])
        uf = np.full(n, math.log(x0[2]))
        x1c, x2c, uc = x1f.copy(), x2f.copy(), uf.copy()
        for _ in range(half_steps):
            xi = rng.standard_normal((2, 3, n))
            for sub in range(2):
                y = np.exp(uf)
                x1f += y * (sdt * xi[sub, 0])
                x2f += y * (sdt * xi[sub, 1])
                uf += sdt * xi[sub, 2] - dt_fine
            y = np.exp(uc)
            x1c += y * (sdt * (xi[0, 0] + xi[1, 0]))
            x2c += y * (sdt * (xi[0, 1] + xi[1, 1]))
            uc += sdt * (xi[0, 2] + xi[1, 2]) - 2 * dt_fine
        return (np.column_stack([x1f, x2f, np.exp(uf)]),
                np.column_stack([x1c, x2c, np.exp(uc)]))
    if gid.startswith("euclidean:"):
        # both legs are exact in law and identical pathwise
        pts = np.tile(x0, (n, 1))
        for _ in range(2 * half_steps):
            pts = pts + sdt * rng.standard_normal((geom.dim, n)).T
        return pts, pts.copy()
    raise InvalidInputError(f"no coupled sampler for {gid}")


# ---------------------------------------------------------------- probes

@dataclass
class ProbeResult:
    value: float
    stderr: float
    n: int
    meta: dict = field(default_factory=dict)


def locality_probe(geom, x, delta, s, cfg: SimConfig) -> ProbeResult:
    """Estimate P_x(d(x, X_s) <= delta) with a binomial standard error."""
    geom = _resolve(geom)
    if delta <= 0:
        raise InvalidInputError("delta must be positive")
    if s == 0:
        return ProbeResult(1.0, 0.0, cfg.n_paths, {"s": 0.0, "delta": delta})
    batch = simulate(geom, x, s, cfg)
    d = geom.distance_to_batch(x, batch.points)
    hit = d <= delta
    p = float(hit.mean())
    se = math.sqrt(max(p * (1 - p), 0.0) / batch.n)
    return ProbeResult(p, se, batch.n,
                       {"s": s, "delta": delta, "dt": batch.dt})


def exit_time_probe(geom, x, r, t, cfg: SimConfig) -> ProbeResult:
    """Estimate P_x(sup_{s <= t} d(x, X_s) > r) on the step skeleton.

    Monitoring only at grid times misses excursions inside a step, so
    the estimate is biased low; the flag in ``meta`` records that.
    """
    geom = _resolve(geom)
    if r <= 0 or t <= 0:
        raise InvalidInputError("r and t must be positive")
    dt = cfg.dt if cfg.dt is not None else geom.default_dt(t)
    sizes = _chunk_sizes(cfg.n_paths, cfg.chunk_size, cfg.antithetic)
    x0 = geom.point(x)

    def one_chunk(c):
        rng = _chunk_rng(cfg.seed, c, cfg.antithetic)
        exited = np.zeros(sizes[c], dtype=bool)

        def observer(state, k):
            alive = ~exited
            if not alive.any():
                return
            d = _screened_distance(geom, x0, state[alive], r)
            exited[np.flatnonzero(alive)[d > r]] = True

        geom.walk_chunk(x0, t, sizes[c], dt, rng, observer)
        return exited

    exited = np.concatenate(_run_chunks(one_chunk, len(sizes)))[:cfg.n_paths]
    p = float(exited.mean())
    se = math.sqrt(max(p * (1 - p), 0.0) / cfg.n_paths)
    return ProbeResult(p, se, cfg.n_paths,
                       {"r": r, "t": t, "dt": dt,
                        "discrete_monitoring": True})


def _screened_distance(geom, x0, pts, r):
    """Distances, skipping the exact Carnot solve where cheap bounds
    already decide the comparison against r."""
    if geom.gid != "heisenberg":
        return geom.distance_to_batch(x0, pts)
    from .geometry.heisenberg import multiply, inverse, \
        cc_distance_from_identity
    rel = multiply(inverse(x0), pts)
    rh = np.hypot(rel[:, 0], rel[:, 1])
    vert = 2.0 * np.sqrt(math.pi * np.abs(rel[:, 2]))
    d = np.where(rh > r, rh, 0.0)  # lower bound already exceeds r
    ambiguous = (rh <= r) & (rh + vert > r)
    if np.any(ambiguous):
        d[ambiguous] = cc_distance_from_identity(rel[ambiguous])
    return d


# ---------------------------------------------------------------- caching

def _pack_header(geometry_id, start, t, n, seed, dt, scheme) -> bytes:
    gid = geometry_id.encode()
    sch = scheme.encode()
    start = np.ascontiguousarray(start, dtype="<f8")
    return b"".join([
        CACHE_MAGIC,
        struct.pack("<H", CACHE_VERSION),
        struct.pack("<H", len(gid)), gid,
        struct.pack("<B", start.size), start.tobytes(),
        struct.pack("<d", t),
        struct.pack("<Q", n),
        struct.pack("<Q", seed),
        struct.pack("<d", dt),
        struct.pack("<H", len(sch)), sch,
    ])


def cache_key(geometry_id, start, t, n, seed, dt, scheme) -> str:
    """Content hash identifying an endpoint batch by its header."""
    hdr = _pack_header(geometry_id, start, float(t), n, seed, float(dt),
                       scheme)
    return hashlib.sha256(hdr).hexdigest()


def write_endpoint_cache(path, batch: EndpointBatch):
    payload = np.ascontiguousarray(batch.points, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_pack_header(batch.geometry_id, batch.start, batch.t,
                              batch.n, batch.seed, batch.dt, batch.scheme))
        fh.write(payload.tobytes())


def read_endpoint_cache(path) -> EndpointBatch:
    with open(path, "rb") as fh:
        raw = fh.read()
    off = 0

    def take(k):
        nonlocal off
        if off + k > len(raw):
            raise CacheFormatError(f"{path}: truncated header")
        out = raw[off:off + k]
        off += k
        return out

    if take(4) != CACHE_MAGIC:
        raise CacheFormatError(f"{path}: bad magic, not an endpoint cache")
    (version,) = struct.unpack("<H", take(2))
    if version > CACHE_VERSION:
        raise CacheFormatError(
            f"{path}: cache version {version} is newer than supported "
            f"{CACHE_VERSION}")
    (glen,) = struct.unpack("<H", take(2))
    gid = take(glen).decode()
    (dim,) = struct.unpack("<B", take(1))
    start = np.frombuffer(take(8 * dim), dtype="<f8").copy()
    (t,) = struct.unpack("<d", take(8))
    (n,) = struct.unpack("<Q", take(8))
    (seed,) = struct.unpack("<Q", take(8))
    (dt,) = struct.unpack("<d", take(8))
    (slen,) = struct.unpack("<H", take(2))
    scheme = take(slen).decode()
    body = raw[off:]
    if len(body) != n * dim * 8:
        raise CacheFormatError(
            f"{path}: payload has {len(body)} bytes, expected {n * dim * 8}")
    pts = np.frombuffer(body, dtype="<f8").reshape(int(n), dim).copy()
    return EndpointBatch(geometry_id=gid, start=start, t=t, points=pts,
                         seed=int(seed), dt=float(dt), scheme=scheme)


def load_or_simulate(geom, x0, t, cfg: SimConfig, cache_dir=None):
    """Simulate, reusing a cached batch with the same header if present."""
    geom = _resolve(geom)
    if cache_dir is None:
        return simulate(geom, x0, t, cfg)
    scheme = cfg.scheme or geom.default_scheme
    dt = 0.0
    if scheme != "exact" and t > 0:
        dt = cfg.dt if cfg.dt is not None else geom.default_dt(t)
    key = cache_key(geom.gid, geom.point(x0), float(t), cfg.n_paths,
                    cfg.seed, dt, scheme)
    path = os.path.join(cache_dir, key + ".hgeb")
    if os.path.exists(path):
        return read_endpoint_cache(path)
    batch = simulate(geom, x0, t, cfg)
    os.makedirs(cache_dir, exist_ok=True)
    write_endpoint_cache(path, batch)
    return batch
