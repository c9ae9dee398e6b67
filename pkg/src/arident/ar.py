"""Prediction-error-optimal AR(1)/AR(2) approximations of a stationary process.

Both families minimise the mean-squared one-step prediction error

    cost(theta) = E[(y(t) - phi_1 y(t-1) - ... - phi_p y(t-p))^2]

of a process with mean ``ybar`` and autocovariance ``psi``. With
``r(tau) = psi(tau) + ybar^2`` the optimum solves the Yule-Walker system in
``r``; for zero-mean processes ``r`` and ``psi`` coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateProcessError,
    InvalidSpecError,
    NonIdentifiableError,
    UnsupportedScenarioError,
)
from .moments import theoretical_mean

__all__ = [
    "ArEstimate",
    "optimal_ar1",
    "optimal_ar2",
    "optimal_ar",
    "prediction_cost",
    "prediction_error_variance",
    "closed_form_white",
    "is_stationary",
]

# relative determinant threshold for the 2x2 normal matrix
_SINGULAR_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ArEstimate:
    """AR coefficients ``[phi_1, ..., phi_order]`` and optionally their error variance."""

    order: int
    coeffs: np.ndarray
    pred_error_variance: float | None = None

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if self.order not in (1, 2):
            raise InvalidSpecError(f"order must be 1 or 2, got {self.order}")
        if coeffs.shape != (self.order,):
            raise InvalidSpecError(f"expected {self.order} coefficients, got {coeffs.shape}")
        if self.pred_error_variance is not None and self.pred_error_variance < 0:
            raise InvalidSpecError("prediction-error variance must be >= 0")
        object.__setattr__(self, "coeffs", coeffs)

    def with_variance(self, variance):
        return ArEstimate(self.order, self.coeffs, float(variance))

    def to_dict(self):
        return {
            "order": self.order,
            "coeffs": [float(c) for c in self.coeffs],
            "pred_error_variance": self.pred_error_variance,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["order"]), d["coeffs"], d.get("pred_error_variance"))


def _need_lags(cov, order):
    if cov.tau_max < order:
        raise InvalidSpecError(f"need covariances up to lag {order}, have {cov.tau_max}")


def optimal_ar1(cov):
    """``phi_1 = (psi(1) + ybar^2) / (psi(0) + ybar^2)``."""
    _need_lags(cov, 1)
    m2 = cov.mean**2
    r0, r1 = cov[0] + m2, cov[1] + m2
    if r0 <= 0:
        raise DegenerateProcessError("psi(0) + ybar^2 is zero: the process is identically zero")
    est = ArEstimate(1, [r1 / r0])
    return est.with_variance(prediction_error_variance(cov, est))


def optimal_ar2(cov):
    """Solve the mean-augmented 2x2 Yule-Walker system.

    Equivalent to

        phi_1 = (psi1 psi0 - psi2 psi1 + m2 (psi0 - psi2)) / D
        phi_2 = (psi2 psi0 - psi1^2 + m2 (psi0 - 2 psi1 + psi2)) / D
        D     = psi0^2 - psi1^2 + 2 m2 (psi0 - psi1)

    with ``m2 = ybar^2``.
    """
    _need_lags(cov, 2)
    m2 = cov.mean**2
    r0, r1, r2 = cov[0] + m2, cov[1] + m2, cov[2] + m2
    if r0 <= 0:
        raise DegenerateProcessError("psi(0) + ybar^2 is zero: the process is identically zero")
    det = r0 * r0 - r1 * r1
    if det <= _SINGULAR_RTOL * r0 * r0:
        raise NonIdentifiableError(
            "normal matrix is singular: infinitely many global minima, AR(2) not identifiable"
        )
    phi1 = r1 * (r0 - r2) / det
    phi2 = (r2 * r0 - r1 * r1) / det
    est = ArEstimate(2, [phi1, phi2])
    return est.with_variance(prediction_error_variance(cov, est))


def optimal_ar(cov, order):
    if order == 1:
        return optimal_ar1(cov)
    if order == 2:
        return optimal_ar2(cov)
    raise InvalidSpecError(f"order must be 1 or 2, got {order}")


def prediction_cost(cov, coeffs):
    """Mean-squared one-step prediction error for arbitrary ``coeffs``.

    Centered quadratic form plus the squared error mean ``((1 - sum phi) ybar)^2``.
    """
    phi = np.atleast_1d(np.asarray(coeffs, dtype=float))
    _need_lags(cov, phi.size)
    psi = cov.values
    # full vector [1, -phi_1, ..., -phi_p] against the Toeplitz covariance block
    w = np.concatenate(([1.0], -phi))
    p = w.size
    idx = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
    centered = float(w @ psi[idx] @ w)
    return centered + ((1.0 - phi.sum()) * cov.mean) ** 2


def prediction_error_variance(cov, est):
    """Variance of the prediction error: the cost minus its squared mean.

    For zero-mean processes the two coincide.
    """
    phi = est.coeffs
    _need_lags(cov, est.order)
    err_mean = (1.0 - phi.sum()) * cov.mean
    return max(prediction_cost(cov, phi) - err_mean**2, 0.0)


def closed_form_white(params, order):
    """Optimal coefficients written directly in ``lam``, ``delta2``, ``xi2`` and ``ybar``.

    Computed without building a covariance sequence; used as the second path
    against ``optimal_ar1/2(theoretical_covariance(params))``.
    """
    if not params.is_white:
        raise UnsupportedScenarioError("closed forms need white q and v; use the covariance path")
    lam = params.lam
    d2, x2 = params.q_spec.variance, params.v_spec.variance
    ybar = theoretical_mean(params)
    m2 = ybar * ybar
    g = 1.0 - lam * lam

    if order == 1:
        den = d2 + g * (x2 + m2)
        if den == 0:
            raise DegenerateProcessError("all variances and the mean are zero")
        phi = np.array([(lam * d2 + g * m2) / den])
        if m2 == 0 and d2 + g * x2 > 0:
            var = ((d2 + x2) ** 2 - lam**2 * x2**2) / (d2 + g * x2)
        else:
            var = _white_quadratic_variance(lam, d2, x2, phi)
    elif order == 2:
        s = d2 + x2
        den = (s + 2 * m2) * s - x2 * lam**2 * (x2 + 2 * m2) - 2 * lam * d2 * m2
        if den == 0:
            if s == 0 and m2 == 0:
                raise DegenerateProcessError("all variances and the mean are zero")
            raise NonIdentifiableError("AR(2) normal matrix is singular")
        phi1 = (lam * d2 + g * m2) * s / den
        phi2 = (lam**2 * d2 * x2 + (d2 * (1 - lam) ** 2 + x2 * g) * m2) / den
        phi = np.array([phi1, phi2])
        var = _white_quadratic_variance(lam, d2, x2, phi)
    else:
        raise InvalidSpecError(f"order must be 1 or 2, got {order}")
    return ArEstimate(order, phi, float(max(var, 0.0)))


def _white_quadratic_variance(lam, d2, x2, phi):
    # centered prediction-error variance with psi written out in lam, d2, x2
    g = 1.0 - lam * lam
    psi0 = d2 / g + x2
    psi1 = lam * d2 / g
    if phi.size == 1:
        return (1 + phi[0] ** 2) * psi0 - 2 * phi[0] * psi1
    psi2 = lam * psi1
    p1, p2 = phi
    return (1 + p1**2 + p2**2) * psi0 + 2 * p1 * (p2 - 1) * psi1 - 2 * p2 * psi2


def is_stationary(coeffs):
    """True when the AR polynomial has all roots inside the unit circle."""
    phi = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if phi.size == 1:
        return abs(phi[0]) < 1
    p1, p2 = phi
    return abs(p2) < 1 and p1 + p2 < 1 and p2 - p1 < 1

