"""Seedable Gaussian noise sources: white streams and AR(1)-filtered colored streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidSpecError, NonstationaryError

__all__ = [
    "NoiseSpec",
    "SeededStream",
    "sample_white",
    "sample_colored",
    "sample",
]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class NoiseSpec:
    """Distribution of one noise source.

    ``coeff`` is ``None`` for white noise. For colored noise it is the
    AR(1) filter coefficient ``a`` in ``q(t) = a q(t-1) + eta(t)`` and
    ``variance`` is the variance of the driving white sequence ``eta``,
    not of the filtered output.
    """

    mean: float = 0.0
    variance: float = 1.0
    coeff: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.mean) or not math.isfinite(self.variance):
            raise InvalidSpecError("noise mean and variance must be finite")
        if self.variance < 0:
            raise InvalidSpecError(f"noise variance must be >= 0, got {self.variance}")
        if self.coeff is not None:
            if not abs(self.coeff) < 1:
                raise NonstationaryError(
                    f"colored-noise coefficient must satisfy |a| < 1, got {self.coeff}"
                )
            if self.mean != 0:
                raise InvalidSpecError("colored noise must be zero-mean")

    @classmethod
    def white(cls, mean=0.0, variance=1.0):
        return cls(float(mean), float(variance), None)

    @classmethod
    def colored(cls, coeff, variance=1.0):
        return cls(0.0, float(variance), float(coeff))

    @property
    def is_white(self):
        return self.coeff is None

    @property
    def kind(self):
        """Textual kind, ``"white"`` or ``"colored:<coeff>"`` (round-trips via :meth:`parse_kind`)."""
        return "white" if self.coeff is None else f"colored:{self.coeff!r}"

    @property
    def output_variance(self):
        """Stationary variance of the generated sequence."""
        if self.coeff is None:
            return self.variance
        return self.variance / (1.0 - self.coeff**2)

    @staticmethod
    def parse_kind(text):
        """Parse ``white`` or ``colored:<coeff>``; returns the coefficient or ``None``."""
        text = text.strip().lower()
        if text == "white":
            return None
        if text.startswith("colored:"):
            try:
                return float(text.split(":", 1)[1])
            except ValueError:
                pass
        raise InvalidSpecError(f"noise kind must be 'white' or 'colored:<coeff>', got {text!r}")


@dataclass(frozen=True)
class SeededStream:
    """Identifies one reproducible random substream.

    Equal ``(seed, stream_index)`` pairs give bit-identical draws; distinct
    indices map to independent children of the same :class:`numpy.random.SeedSequence`.
    """

    seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _UINT64_MAX):
            raise InvalidSpecError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.stream_index < 0:
            raise InvalidSpecError(f"stream_index must be >= 0, got {self.stream_index}")

    def generator(self, *subkeys):
        """Fresh PCG64 generator for this stream, optionally for a named sub-stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index, *subkeys))
        return np.random.Generator(np.random.PCG64(ss))


def _check_count(n, name="n", minimum=1):
    if int(n) != n or n < minimum:
        raise InvalidSpecError(f"{name} must be an integer >= {minimum}, got {n}")
    return int(n)


def _white(spec, n, rng):
    z = rng.standard_normal(n)
    return spec.mean + math.sqrt(spec.variance) * z


def _colored(spec, n, rng, burn_in=0):
    a = spec.coeff
    sd = math.sqrt(spec.variance)
    total = burn_in + n
    # driving noise first so that a == 0 reproduces the white stream exactly
    eta = sd * rng.standard_normal(total)
    q0 = sd / math.sqrt(1.0 - a * a) * rng.standard_normal()
    q = lfilter([1.0], [1.0, -a], eta, zi=[a * q0])[0]
    return q[burn_in:]


def sample_white(spec, n, stream):
    """Draw ``n`` i.i.d. Gaussian samples with ``spec.mean`` and ``spec.variance``."""
    if not spec.is_white:
        raise InvalidSpecError("sample_white needs a white NoiseSpec")
    n = _check_count(n)
    return _white(spec, n, stream.generator())


def sample_colored(spec, n, stream, burn_in=0):
    """Draw ``n`` samples of the stationary AR(1) process ``q(t) = a q(t-1) + eta(t)``.

    The initial state comes from the stationary law ``N(0, var / (1 - a^2))``,
    so the output is stationary from the first sample; ``burn_in`` extra
    samples are generated and discarded before the returned block.
    """
    if spec.is_white:
        raise InvalidSpecError("sample_colored needs a colored NoiseSpec")
    if not abs(spec.coeff) < 1:
        raise NonstationaryError(f"|coeff| must be < 1, got {spec.coeff}")
    n = _check_count(n)
    burn_in = _check_count(burn_in, "burn_in", 0)
    return _colored(spec, n, stream.generator(), burn_in)


def sample(spec, n, rng):
    """Dispatch on ``spec`` kind using an already constructed generator."""
    if spec.is_white:
        return _white(spec, n, rng)
    return _colored(spec, n, rng)
