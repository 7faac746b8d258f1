"""Seeded Monte Carlo bias/MSE studies of the kernel estimators.

Every replication draws from its own generator, keyed by
``(master_seed, cell_index, rep_index)``, so the estimates do not depend on
how replications are split across workers.  Aggregation uses ``math.fsum``
over the estimates in replication order, which makes reports bit-identical
for any worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import Lifetime, make_distribution
from .entropy import check_alpha, dcrmhe
from .errors import CRMHEError, DomainError, InvalidParameterError
from .kernel import KernelEstimatorConfig, estimate_dcrmhe

__all__ = [
    "rng_stream",
    "bias_mse",
    "SimulationPlan",
    "CellResult",
    "SimulationReport",
    "run_simulation",
    "load_plan",
    "parallel_map",
]

CHUNK_REPS = 250


def rng_stream(master_seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for the substream ``indices`` of ``master_seed``."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(i) for i in indices))
    return np.random.Generator(np.random.PCG64(seq))


def bias_mse(estimates, true_value: float) -> tuple[float, float]:
    est = [float(e) for e in np.asarray(estimates, dtype=float).ravel()]
    if not est:
        raise DomainError("bias/MSE of an empty set of estimates")
    n = len(est)
    mean = math.fsum(est) / n
    bias = mean - true_value
    mse = math.fsum((e - true_value) ** 2 for e in est) / n
    return bias, mse


def parallel_map(fn, tasks, workers: int | None):
    """Ordered map over ``tasks``, in-process when ``workers`` is 1."""
    tasks = list(tasks)
    if not workers or workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


@dataclass(frozen=True)
class SimulationPlan:
    """One study: a distribution, an order, sample sizes and optional truncation times.

    An empty ``t_values`` studies the static estimator.
    """

    dist: Lifetime
    alpha: float
    n_values: tuple[int, ...]
    t_values: tuple[float, ...] = ()
    reps: int = 10_000
    master_seed: int = 0
    config: KernelEstimatorConfig = field(default_factory=KernelEstimatorConfig)

    def __post_init__(self):
        check_alpha(self.alpha)
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "t_values", tuple(float(t) for t in self.t_values))
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise InvalidParameterError("every sample size must be at least 2")
        if int(self.reps) != self.reps or self.reps < 1:
            raise InvalidParameterError("reps must be a positive integer")
        for t in self.t_values:
            if not (t >= 0.0 and self.dist.log_survival(t) > -math.inf):
                raise InvalidParameterError(f"t={t} lies outside the support of {self.dist}")

    def cells(self) -> list[tuple[float | None, int]]:
        """(t, n) pairs, t-major; t is None for the static estimator."""
        ts = self.t_values or (None,)
        return [(t, n) for t in ts for n in self.n_values]

    def describe(self) -> dict:
        c = self.config
        return {
            "family": self.dist.family,
            "params": list(self.dist.params),
            "alpha": self.alpha,
            "n": list(self.n_values),
            "t": list(self.t_values),
            "reps": self.reps,
            "seed": self.master_seed,
            "kernel": c.kernel,
            "bandwidth": c.bandwidth,
            "grid_points": c.grid_points,
            "upper_pad_bandwidths": c.upper_pad_bandwidths,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class CellResult:
    t: float | None
    n: int
    true_value: float
    mean_estimate: float
    bias: float
    mse: float
    reps: int
    elapsed: float = 0.0
    error: str = ""


@dataclass(frozen=True)
class SimulationReport:
    plan: SimulationPlan
    cells: tuple[CellResult, ...]

    @property
    def seed(self) -> int:
        return self.plan.master_seed

    @property
    def config_hash(self) -> str:
        return self.plan.config_hash()

    def rows(self) -> list[dict]:
        """Flat records in the CSV column order (elapsed time left out)."""
        d = self.plan.dist
        label = f"{d.family}({','.join(f'{p:g}' for p in d.params)})"
        out = []
        for c in self.cells:
            out.append(
                {
                    "dist": label,
                    "alpha": self.plan.alpha,
                    "t": c.t,
                    "n": c.n,
                    "true": c.true_value,
                    "mean_est": c.mean_estimate,
                    "bias": c.bias,
                    "mse": c.mse,
                    "reps": c.reps,
                    "seed": self.plan.master_seed,
                    "error": c.error,
                }
            )
        return out


def _run_chunk(task):
    dist, alpha, t, n, config, seed, cell, start, stop = task
    t0 = time.perf_counter()
    out = np.empty(stop - start)
    for i, rep in enumerate(range(start, stop)):
        x = dist.sample(n, rng_stream(seed, cell, rep))
        try:
            out[i] = estimate_dcrmhe(x, alpha, 0.0 if t is None else t, config).value
        except CRMHEError:
            out[i] = np.nan
    return out, time.perf_counter() - t0


def run_simulation(plan: SimulationPlan, workers: int | None = 1) -> SimulationReport:
    """Run every cell of ``plan``; failures are recorded per cell, not raised."""
    cells = plan.cells()
    truths: list[float | None] = []
    errors: list[str] = []
    for t, _ in cells:
        try:
            truths.append(dcrmhe(plan.dist, plan.alpha, 0.0 if t is None else t).value)
            errors.append("")
        except CRMHEError as exc:
            truths.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")

    tasks = []
    for ci, (t, n) in enumerate(cells):
        if truths[ci] is None:
            continue
        for start in range(0, plan.reps, CHUNK_REPS):
            stop = min(start + CHUNK_REPS, plan.reps)
            tasks.append((plan.dist, plan.alpha, t, n, plan.config, plan.master_seed, ci, start, stop))

    chunks = parallel_map(_run_chunk, tasks, workers)
    by_cell: dict[int, list[np.ndarray]] = {}
    seconds: dict[int, float] = {}
    for task, (chunk, secs) in zip(tasks, chunks):
        by_cell.setdefault(task[6], []).append(chunk)
        seconds[task[6]] = seconds.get(task[6], 0.0) + secs

    results = []
    for ci, (t, n) in enumerate(cells):
        if truths[ci] is None:
            results.append(CellResult(t, n, math.nan, math.nan, math.nan, math.nan, 0, 0.0, errors[ci]))
            continue
        est = np.concatenate(by_cell[ci])
        ok = est[np.isfinite(est)]
        failed = est.size - ok.size
        err = f"{failed} replication(s) failed" if failed else ""
        if ok.size == 0:
            results.append(CellResult(t, n, truths[ci], math.nan, math.nan, math.nan, 0, 0.0, err))
            continue
        bias, mse = bias_mse(ok, truths[ci])
        mean = math.fsum(ok.tolist()) / ok.size
        results.append(CellResult(t, n, truths[ci], mean, bias, mse, int(ok.size), seconds[ci], err))
    return SimulationReport(plan, tuple(results))


def _split_list(text: str, cast):
    text = text.strip()
    if not text:
        return ()
    return tuple(cast(p) for p in text.replace(";", ",").split(",") if p.strip())


def load_plan(path) -> SimulationPlan:
    """Read a flat ``key = value`` plan file.

    Keys: family, params, alpha, n, t, reps, seed, and optionally kernel,
    bandwidth, grid_points.  ``#`` starts a comment.
    """
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise InvalidParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split(sep, 1))
            entries[key.lower()] = value
    missing = [k for k in ("family", "params", "alpha", "n", "seed") if k not in entries]
    if missing:
        raise InvalidParameterError(f"plan file lacks required key(s): {', '.join(missing)}")
    try:
        dist = make_distribution(entries["family"], entries["params"])
        bw = entries.get("bandwidth", "").strip().lower()
        config = KernelEstimatorConfig(
            kernel=entries.get("kernel", "gaussian").strip().lower(),
            bandwidth=None if bw in ("", "silverman") else float(bw),
            grid_points=int(entries.get("grid_points", 2048)),
        )
        return SimulationPlan(
            dist=dist,
            alpha=float(entries["alpha"]),
            n_values=_split_list(entries["n"], int),
            t_values=_split_list(entries.get("t", ""), float),
            reps=int(entries.get("reps", 10_000)),
            master_seed=int(entries["seed"]),
            config=config,
        )
    except ValueError as exc:
        if isinstance(exc, InvalidParameterError):
            raise
        raise InvalidParameterError(f"{path}: {exc}") from None
