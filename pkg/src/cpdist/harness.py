"""Seeded Monte Carlo search for triangle-inequality violations of
diagonal-form operators built from random distance matrices."""
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .distmat import DistanceMatrix, PointCloud, from_points
from .io import rows_to_csv
from .semimetrics import WedgeOperatorQ
from .triangular import DeficitRecord, deficit
from .wedge import haar_random_states, orthonormal_triples

DEFAULT_TOL = 1e-13
DMAT_MODES = ("random-uniform", "linf-points")
VECTOR_MODES = ("haar", "orthonormal")
# candidate draws for one entry before the partial matrix is abandoned
MAX_ENTRY_DRAWS = 10_000
VERIFY_TOL = 1e-12

SEARCH_HEADER = [
    "dim", "mode", "vector_mode", "samples", "min_deficit", "violations",
    "seed", "wall_time_s",
]
TABLE_HEADER = ["dim", "vector_mode", "samples", "min_random_D", "min_linf_D"]


@dataclass
class SamplerStats:
    """Bookkeeping of :func:`random_distance_matrix`.

    ``draws`` counts candidate draws per upper-triangle entry (lexicographic
    order), ``first_hits`` how often the first candidate was accepted. The
    acceptance probability of a uniform candidate is
    ``first_hits / attempts``; ``attempts / draws`` is biased towards narrow
    intervals, which need many draws.
    """

    n: int
    draws: np.ndarray = None
    first_hits: np.ndarray = None
    attempts: np.ndarray = None
    restarts: int = 0
    matrices: int = 0

    def __post_init__(self):
        m = self.n * (self.n - 1) // 2
        for name in ("draws", "first_hits", "attempts"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(m, dtype=np.int64))

    def acceptance_rate(self, entry):
        return self.first_hits[entry] / self.attempts[entry]


def random_distance_matrix(n, rng, stats=None):
    """Uniform ``[0, 1]`` entries drawn in lexicographic order, each redrawn
    until it satisfies every triangle whose other two sides already exist.

    If an entry's admissible interval is empty (or is not hit within
    ``MAX_ENTRY_DRAWS`` draws) the partial matrix is discarded and sampling
    restarts; ``stats.restarts`` counts these.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if stats is None:
        stats = SamplerStats(n)
    I, J = np.triu_indices(n, 1)
    while True:
        d = np.zeros((n, n))
        ok = True
        for p, (i, j) in enumerate(zip(I, J)):
            # earlier entries close a triangle with (i, j) only through k < i
            if i > 0:
                a, b = d[:i, i], d[:i, j]
                lo = float(np.max(np.abs(a - b)))
                hi = float(min(1.0, np.min(a + b)))
            else:
                lo, hi = 0.0, 1.0
            if lo > hi:
                ok = False
                break
            stats.attempts[p] += 1
            for k in range(MAX_ENTRY_DRAWS):
                u = rng.random()
                stats.draws[p] += 1
                if lo <= u <= hi:
                    stats.first_hits[p] += k == 0
                    break
            else:
                ok = False
                break
            d[i, j] = d[j, i] = u
        if ok:
            stats.matrices += 1
            return DistanceMatrix(d)
        stats.restarts += 1


def linf_points(n, rng):
    """``n`` points uniform in the cube ``[0, 1]^(2n)``."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return PointCloud(rng.random((n, 2 * n)), np.inf)


def linf_distance_matrix(n, rng):
    return from_points(linf_points(n, rng))


def planted_matrix(n):
    """Non-metric labels with a ``(1, 1, 3)`` triangle on the first three
    indices; every other entry is 1."""
    d = np.ones((n, n))
    np.fill_diagonal(d, 0.0)
    d[1, 2] = d[2, 1] = 3.0
    return DistanceMatrix(d)


@dataclass(frozen=True)
class TrialConfig:
    dim: int
    num_dmats: int
    triples_per_dmat: int
    dmat_mode: str = "random-uniform"
    vector_mode: str = "orthonormal"
    seed: int = 0
    tol: float = DEFAULT_TOL
    threads: int = 1
    # debug: replace matrix 0 with planted_matrix(dim)
    plant_violation: bool = False

    def __post_init__(self):
        if self.dim < 3:
            raise ValueError("dim must be >= 3")
        if self.num_dmats < 1 or self.triples_per_dmat < 1:
            raise ValueError("counts must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.dmat_mode not in DMAT_MODES:
            raise ValueError(f"dmat_mode must be one of {DMAT_MODES}")
        if self.vector_mode not in VECTOR_MODES:
            raise ValueError(f"vector_mode must be one of {VECTOR_MODES}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass
class SearchReport:
    config: TrialConfig
    samples: int
    min_deficit: float
    argmin: Optional[DeficitRecord]
    argmin_dmat: Optional[DistanceMatrix]
    violations: int
    restarts: int
    wall_time: float
    interrupted: bool = False
    per_dmat_min: np.ndarray = field(default=None, repr=False)

    def to_json(self, include_time=True):
        out = {
            "config": asdict(self.config),
            "samples": self.samples,
            "min_deficit": self.min_deficit,
            "violations": self.violations,
            "restarts": self.restarts,
            "interrupted": self.interrupted,
            "argmin": None if self.argmin is None else self.argmin.to_json(),
            "argmin_dmat": None if self.argmin_dmat is None else self.argmin_dmat.to_json(),
        }
        if include_time:
            out["wall_time_s"] = self.wall_time
        return out

    def csv_row(self):
        c = self.config
        return [c.dim, c.dmat_mode, c.vector_mode, self.samples, self.min_deficit,
                self.violations, c.seed, round(self.wall_time, 6)]


_MODE_CODE = {"random-uniform": 0, "linf-points": 1}


def _streams(cfg, index):
    base = [int(cfg.seed), cfg.dim, _MODE_CODE[cfg.dmat_mode], index]
    mat = np.random.Generator(np.random.Philox(np.random.SeedSequence(base)))
    vec = np.random.Generator(np.random.Philox(np.random.SeedSequence(base + [1])))
    return mat, vec


def _one_dmat(cfg, index):
    mat_rng, vec_rng = _streams(cfg, index)
    stats = SamplerStats(cfg.dim)
    if cfg.plant_violation and index == 0:
        D = planted_matrix(cfg.dim)
    elif cfg.dmat_mode == "random-uniform":
        D = random_distance_matrix(cfg.dim, mat_rng, stats)
    else:
        D = linf_distance_matrix(cfg.dim, mat_rng)
    k, n = cfg.triples_per_dmat, cfg.dim
    if cfg.vector_mode == "orthonormal":
        X, Y, Z = orthonormal_triples(k, n, vec_rng)
    else:
        X, Y, Z = (haar_random_states(k, n, vec_rng) for _ in range(3))
    f = kernels.diag_deficits(np.ascontiguousarray(D.d ** 2), X, Y, Z)
    t = int(np.argmin(f))
    return {
        "index": index,
        "min": float(f[t]),
        "triple": (X[t].copy(), Y[t].copy(), Z[t].copy()),
        "dmat": D,
        "violations": int(np.sum(f < -cfg.tol)),
        "restarts": stats.restarts,
    }


def run_search(cfg):
    """Minimum deficit over ``num_dmats x triples_per_dmat`` random quadruples.

    Each matrix index owns its own Philox substreams, so the report (apart
    from ``wall_time``) does not depend on ``threads``. The argmin triple is
    re-evaluated through the dense semidistance path before reporting.
    """
    t0 = time.perf_counter()
    results = {}
    interrupted = False
    pool = ThreadPoolExecutor(max_workers=cfg.threads)
    try:
        futs = [pool.submit(_one_dmat, cfg, i) for i in range(cfg.num_dmats)]
        for fu in futs:
            r = fu.result()
            results[r["index"]] = r
    except KeyboardInterrupt:
        interrupted = True
        for fu in futs:
            fu.cancel()
    finally:
        pool.shutdown(wait=not interrupted, cancel_futures=True)
    wall = time.perf_counter() - t0
    if not results:
        return SearchReport(cfg, 0, float("nan"), None, None, 0, 0, wall, interrupted)
    order = sorted(results)
    mins = np.array([results[i]["min"] for i in order])
    best = results[order[int(np.argmin(mins))]]
    x, y, z = best["triple"]
    op = WedgeOperatorQ.from_dmat(best["dmat"])
    value = deficit(op, x, y, z)
    if abs(value - best["min"]) > VERIFY_TOL * max(1.0, abs(value)):
        raise RuntimeError(
            f"re-verification mismatch: kernel {best['min']!r}, direct {value!r}"
        )
    return SearchReport(
        config=cfg,
        samples=len(order) * cfg.triples_per_dmat,
        min_deficit=value,
        argmin=DeficitRecord(x, y, z, value),
        argmin_dmat=best["dmat"],
        violations=sum(results[i]["violations"] for i in order),
        restarts=sum(results[i]["restarts"] for i in order),
        wall_time=wall,
        interrupted=interrupted,
        per_dmat_min=mins,
    )


def search_csv(reports):
    return rows_to_csv(SEARCH_HEADER, [r.csv_row() for r in reports])


def reproduce_table(dims, num_dmats, triples, seed=0, threads=1, tol=DEFAULT_TOL):
    """Grid of searches over ``dims``, both matrix modes and both vector modes.

    Returns ``(rows, reports)``; each row is
    ``(dim, vector_mode, samples, min_random_D, min_linf_D)``.
    """
    rows, reports = [], []
    for dim in dims:
        for vmode in VECTOR_MODES:
            mins = {}
            for dmode in DMAT_MODES:
                cfg = TrialConfig(dim, num_dmats, triples, dmode, vmode, seed, tol, threads)
                rep = run_search(cfg)
                reports.append(rep)
                mins[dmode] = rep.min_deficit
            rows.append((dim, vmode, num_dmats * triples,
                         mins["random-uniform"], mins["linf-points"]))
    return rows, reports


def table_csv(rows):
    return rows_to_csv(TABLE_HEADER, rows)
