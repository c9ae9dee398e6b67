"""Batch least-squares AR fitting and multi-batch estimator statistics."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ar import ArEstimate
from .errors import BatchFailure, InsufficientLengthError, InvalidSpecError, NonIdentifiableError
from .noise import SeededStream
from .system import DEFAULT_BURN_IN, simulate

__all__ = [
    "RegressionProblem",
    "BatchSummary",
    "build_problem",
    "ls_fit",
    "fit_ar",
    "residuals",
    "summarize",
    "running_moments",
    "batch_estimate",
    "write_batch_csv",
]

COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """Targets ``y(t)`` and lagged regressors ``[y(t-1), ..., y(t-order)]``, no intercept."""

    order: int
    targets: np.ndarray
    regressors: np.ndarray

    def __post_init__(self):
        if self.regressors.shape != (len(self.targets), self.order):
            raise InvalidSpecError("regressor rows must match targets and have `order` columns")


def build_problem(y, order):
    """Lag-align a series for an AR(``order``) regression.

    ``y`` may be a :class:`~arident.system.Trajectory` or any 1-D array.
    """
    if order not in (1, 2):
        raise InvalidSpecError(f"order must be 1 or 2, got {order}")
    y = np.asarray(getattr(y, "values", y), dtype=float)
    n = y.size
    if n < order + 1:
        raise InsufficientLengthError(f"need at least {order + 1} samples for order {order}, got {n}")
    regressors = np.column_stack([y[order - k : n - k] for k in range(1, order + 1)])
    return RegressionProblem(order, y[order:].copy(), regressors)


def ls_fit(problem):
    """Solve the normal equations ``(sum z z^T) theta = sum z y``.

    Raises :class:`NonIdentifiableError` when the normal matrix is singular
    or its condition number exceeds ``COND_LIMIT``.
    """
    z, y = problem.regressors, problem.targets
    gram = z.T @ z
    rhs = z.T @ y
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > COND_LIMIT:
        raise NonIdentifiableError(
            "normal matrix sum z(t) z(t)^T is singular or ill-conditioned: "
            "the least-squares cost has infinitely many global minima"
        )
    theta = scipy.linalg.solve(gram, rhs, assume_a="pos")
    return ArEstimate(problem.order, theta)


def residuals(problem, est):
    return problem.targets - problem.regressors @ est.coeffs


def fit_ar(y, order):
    """Least-squares AR fit with the residual variance attached."""
    problem = build_problem(y, order)
    est = ls_fit(problem)
    return est.with_variance(float(np.var(residuals(problem, est))))


def _dispersion(estimates):
    # 1/kappa normalisation, outer products of deviations from the batch mean
    mean = np.sum(estimates, axis=0) / len(estimates)
    dev = estimates - mean
    return mean, dev.T @ dev / len(estimates)


def running_moments(estimates):
    """Empirical mean and per-coefficient variance over the first ``k`` batches, ``k = 1..kappa``.

    The last row is computed exactly as in :func:`summarize`, so it matches
    the final batch summary bit for bit.
    """
    estimates = np.asarray(estimates, dtype=float)
    if estimates.ndim == 1:
        estimates = estimates[:, None]
    means, variances = [], []
    for k in range(1, len(estimates) + 1):
        m, v = _dispersion(estimates[:k])
        means.append(m)
        variances.append(np.diag(v).copy())
    return np.array(means), np.array(variances)


@dataclass(frozen=True, eq=False)
class BatchSummary:
    """Per-batch estimates with their empirical mean and (1/kappa-normalised) variance.

    The variance is the biased sample variance, scalar for order 1 and a
    symmetric 2x2 matrix for order 2.
    """

    order: int
    estimates: np.ndarray
    emp_mean: np.ndarray
    emp_variance: np.ndarray
    n: int

    @property
    def kappa(self):
        return len(self.estimates)

    def to_dict(self):
        var = self.emp_variance
        return {
            "order": self.order,
            "kappa": self.kappa,
            "n": self.n,
            "emp_mean": [float(x) for x in self.emp_mean],
            "emp_variance": float(var) if self.order == 1 else [[float(x) for x in row] for row in var],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def summarize(estimates, order, n):
    """Empirical mean and variance of a stack of AR estimates (``kappa x order``)."""
    estimates = np.asarray(
        [e.coeffs if isinstance(e, ArEstimate) else e for e in estimates], dtype=float
    ).reshape(-1, order)
    if len(estimates) < 1:
        raise InvalidSpecError("need at least one estimate")
    mean, var = _dispersion(estimates)
    emp_var = var[0, 0] if order == 1 else var
    return BatchSummary(order, estimates, mean, np.asarray(emp_var), int(n))


def batch_estimate(
    params, order, n, kappa, master_seed=0, burn_in=DEFAULT_BURN_IN, workers=None, streams=None
):
    """Simulate ``kappa`` independent trajectories, fit each, and summarise.

    Batch ``i`` uses ``SeededStream(master_seed, i)`` unless explicit
    ``streams`` are given. A failing fit raises :class:`BatchFailure` carrying
    the batch index.
    """
    if int(kappa) != kappa or kappa < 2:
        raise InvalidSpecError(f"kappa must be an integer >= 2, got {kappa}")
    if streams is None:
        streams = [SeededStream(master_seed, i) for i in range(int(kappa))]
    elif len(streams) != kappa:
        raise InvalidSpecError("need one stream per batch")

    def run(i):
        traj = simulate(params, n, burn_in, streams[i])
        try:
            return ls_fit(build_problem(traj, order)).coeffs
        except NonIdentifiableError as exc:
            raise BatchFailure(i, exc) from exc

    if workers is None or workers <= 1:
        coeffs = [run(i) for i in range(int(kappa))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            coeffs = list(pool.map(run, range(int(kappa))))
    return summarize(coeffs, order, n)


def write_batch_csv(summary, path_or_file):
    """``batch_index,phi1[,phi2]`` with 0-based batch indices."""
    header = ["batch_index"] + [f"phi{k}" for k in range(1, summary.order + 1)]

    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, row in enumerate(summary.estimates):
            w.writerow([i] + [repr(float(x)) for x in row])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
