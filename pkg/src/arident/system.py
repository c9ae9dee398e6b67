"""Simulation of the first-order filtered-noise-plus-measurement-noise system.

The true system is

    y(t) = lam * y(t-1) + q(t) + v(t) - lam * v(t-1)

i.e. ``y = q / (1 - lam z^-1) + v`` with independent process noise ``q``
and measurement noise ``v``.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import InsufficientLengthError, InvalidSpecError, NonstationaryError
from .noise import NoiseSpec, SeededStream, sample

__all__ = [
    "SystemParams",
    "Trajectory",
    "simulate",
    "simulate_batches",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

DEFAULT_BURN_IN = 1000
# sub-stream keys under a SeededStream
_Q_KEY, _V_KEY = 0, 1


@dataclass(frozen=True)
class SystemParams:
    lam: float
    q_spec: NoiseSpec = field(default_factory=NoiseSpec)
    v_spec: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        if not abs(self.lam) < 1:
            raise NonstationaryError(f"system pole must satisfy |lambda| < 1, got {self.lam}")
        if not self.v_spec.is_white:
            raise InvalidSpecError("measurement noise v must be white")

    @classmethod
    def white(cls, lam, delta2, xi2, qbar=0.0, vbar=0.0):
        """Both noises white: ``q ~ WN(qbar, delta2)``, ``v ~ WN(vbar, xi2)``."""
        return cls(float(lam), NoiseSpec.white(qbar, delta2), NoiseSpec.white(vbar, xi2))

    @property
    def is_white(self):
        return self.q_spec.is_white and self.v_spec.is_white

    @property
    def stationary_mean(self):
        return self.v_spec.mean + self.q_spec.mean / (1.0 - self.lam)


@dataclass(frozen=True, eq=False)
class Trajectory:
    values: np.ndarray
    params: SystemParams
    stream: SeededStream
    burn_in: int = 0

    def __len__(self):
        return len(self.values)


def _check_lengths(n, burn_in):
    if int(n) != n or n < 3:
        raise InsufficientLengthError(f"trajectory length must be >= 3, got {n}")
    if int(burn_in) != burn_in or burn_in < 0:
        raise InvalidSpecError(f"burn_in must be a non-negative integer, got {burn_in}")
    return int(n), int(burn_in)


def simulate(params, n, burn_in=DEFAULT_BURN_IN, stream=SeededStream()):
    """Run the system recursion for ``burn_in + n`` steps and keep the last ``n``.

    ``y(0)`` and ``v(0)`` start at their stationary means. ``q`` and ``v``
    come from independent sub-streams of ``stream``.
    """
    n, burn_in = _check_lengths(n, burn_in)
    lam = params.lam
    total = burn_in + n
    q = sample(params.q_spec, total, stream.generator(_Q_KEY))
    v = sample(params.v_spec, total, stream.generator(_V_KEY))

    v_prev = np.empty_like(v)
    v_prev[0] = params.v_spec.mean
    v_prev[1:] = v[:-1]
    drive = q + v - lam * v_prev
    y0 = params.stationary_mean
    y = lfilter([1.0], [1.0, -lam], drive, zi=[lam * y0])[0]
    return Trajectory(y[burn_in:], params, stream, burn_in)


def simulate_batches(params, n, kappa, burn_in=DEFAULT_BURN_IN, master_seed=0, workers=None):
    """``kappa`` independent trajectories; batch ``i`` uses stream index ``i``.

    Streams are fixed before dispatch, so the result does not depend on
    ``workers`` or on scheduling.
    """
    if int(kappa) != kappa or kappa < 1:
        raise InvalidSpecError(f"kappa must be an integer >= 1, got {kappa}")
    _check_lengths(n, burn_in)
    streams = [SeededStream(master_seed, i) for i in range(int(kappa))]

    def run(stream):
        return simulate(params, n, burn_in, stream)

    if workers is None or workers <= 1:
        return [run(s) for s in streams]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, streams))


def write_trajectory_csv(traj, path_or_file):
    """Write ``t,y`` rows with ``t`` starting at 1."""
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "y"])
        for t, y in enumerate(traj.values, start=1):
            w.writerow([t, repr(float(y))])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def read_trajectory_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["y"]) for r in rows])
