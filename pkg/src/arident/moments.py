"""Exact mean, variance and autocovariance of the simulated output ``y``."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError, UnsupportedScenarioError

__all__ = [
    "CovarianceSeq",
    "theoretical_mean",
    "theoretical_variance",
    "theoretical_covariance",
    "colored_covariance",
    "stationary_covariance",
    "covariance_recursion",
    "sample_autocovariance",
    "write_covariance_csv",
]


@dataclass(frozen=True, eq=False)
class CovarianceSeq:
    """Autocovariances ``psi[0..tau_max]`` about the process mean ``mean``."""

    mean: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise InvalidSpecError("covariance values must be a non-empty 1-D sequence")
        object.__setattr__(self, "values", values)

    @property
    def tau_max(self):
        return len(self.values) - 1

    def __getitem__(self, tau):
        return self.values[tau]

    def toeplitz(self, size=3):
        from scipy.linalg import toeplitz

        return toeplitz(self.values[:size])


def _require_white(params):
    if not params.is_white:
        raise UnsupportedScenarioError(
            "closed forms cover white q only; use colored_covariance for colored q"
        )


def _check_tau_max(tau_max, minimum=2):
    if int(tau_max) != tau_max or tau_max < minimum:
        raise InvalidSpecError(f"tau_max must be an integer >= {minimum}, got {tau_max}")
    return int(tau_max)


def theoretical_mean(params):
    """``E[y] = vbar + qbar / (1 - lam)``."""
    return params.v_spec.mean + params.q_spec.mean / (1.0 - params.lam)


def theoretical_variance(params):
    """``delta2 / (1 - lam^2) + xi2``; unaffected by the noise means."""
    _require_white(params)
    lam = params.lam
    return params.q_spec.variance / (1.0 - lam * lam) + params.v_spec.variance


def theoretical_covariance(params, tau_max=2):
    """White-noise autocovariance.

    ``psi(0) = delta2 / (1 - lam^2) + xi2`` and
    ``psi(tau) = lam^tau delta2 / (1 - lam^2)`` for ``tau >= 1``.
    """
    _require_white(params)
    tau_max = _check_tau_max(tau_max)
    lam = params.lam
    delta2, xi2 = params.q_spec.variance, params.v_spec.variance
    filtered = delta2 / (1.0 - lam * lam)
    values = filtered * lam ** np.arange(tau_max + 1, dtype=float)
    values[0] = filtered + xi2
    return CovarianceSeq(theoretical_mean(params), values)


def covariance_recursion(params):
    """Lags 0..2 from the one-step moment relations

        psi(0) = lam psi(1) + delta2 + xi2
        psi(1) = lam psi(0) - lam xi2
        psi(2) = lam psi(1)

    solved as a linear system. Independent of :func:`theoretical_covariance`;
    kept as a cross-check.
    """
    _require_white(params)
    lam = params.lam
    delta2, xi2 = params.q_spec.variance, params.v_spec.variance
    a = np.array([[1.0, -lam, 0.0], [-lam, 1.0, 0.0], [0.0, -lam, 1.0]])
    b = np.array([delta2 + xi2, -lam * xi2, 0.0])
    return CovarianceSeq(theoretical_mean(params), np.linalg.solve(a, b))


def colored_covariance(params, tau_max=2):
    """Autocovariance of ``y = x + v`` when ``q`` is AR(1) colored noise.

    With ``q(t) = a q(t-1) + eta(t)``, ``s2 = var_eta / (1 - a^2)`` and
    ``x(t) = lam x(t-1) + q(t)``:

        psi_x(0)   = s2 / (1 - lam^2) * (1 + 2 a lam / (1 - a lam))
        psi_x(tau) = lam psi_x(tau-1) + s2 a^tau / (1 - a lam)

    and ``psi_y(tau) = psi_x(tau) + xi2 [tau == 0]``.
    """
    if params.q_spec.is_white:
        raise UnsupportedScenarioError("q is white; use theoretical_covariance")
    tau_max = _check_tau_max(tau_max)
    lam, a = params.lam, params.q_spec.coeff
    s2 = params.q_spec.variance / (1.0 - a * a)
    cross = s2 / (1.0 - a * lam)
    values = np.empty(tau_max + 1)
    values[0] = s2 / (1.0 - lam * lam) * (1.0 + 2.0 * a * lam / (1.0 - a * lam))
    for tau in range(1, tau_max + 1):
        values[tau] = lam * values[tau - 1] + cross * a**tau
    values[0] += params.v_spec.variance
    return CovarianceSeq(theoretical_mean(params), values)


def stationary_covariance(params, tau_max=2):
    """Pick the closed form matching the noise kind of ``params``."""
    if params.q_spec.is_white:
        return theoretical_covariance(params, tau_max)
    return colored_covariance(params, tau_max)


def sample_autocovariance(y, tau_max, demean=True):
    """Biased (1/N) sample autocovariances for lags ``0..tau_max``."""
    y = np.asarray(y, dtype=float)
    n = y.size
    mean = y.mean() if demean else 0.0
    d = y - mean
    values = np.array([d[tau:] @ d[: n - tau] / n for tau in range(tau_max + 1)])
    return CovarianceSeq(float(mean), values)


def write_covariance_csv(cov, path_or_file):
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "psi"])
        for tau, psi in enumerate(cov.values):
            w.writerow([tau, repr(float(psi))])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
