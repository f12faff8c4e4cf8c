"""Noise-robust first-derivative estimation over a sliding window.

The estimator is a fixed linear functional of the trailing window: the
continuous kernel (6/T^3)(2*tau - T) applied to the last T seconds of
signal returns the slope of the best affine fit, which for noisy data is a
far better-behaved derivative than finite differences.  Discretized with
trapezoidal weights plus a one-time moment correction, the weight vector
annihilates constants exactly and has exactly unit response to slope.

The estimate is timestamped at the window's trailing (most recent) edge;
for smooth signals it approximates the true derivative near the window
midpoint, i.e. it carries an inherent delay of about half the window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "InsufficientDataError",
    "DiffKernel",
    "SampleWindow",
    "design_kernel",
    "estimate_derivative",
    "StreamingDifferentiator",
    "trapezoid_weights",
    "window_sample_count",
]

# Tolerance for the uniform-spacing invariant of SampleWindow (seconds).
_SPACING_TOL = 1e-9


class InsufficientDataError(Exception):
    """Raised when an estimate is requested before its window is full."""


def window_sample_count(window_T: float, fs: float) -> int:
    """Number of samples in a trailing window of nominal length window_T."""
    return int(round(window_T * fs)) + 1


def trapezoid_weights(kernel, n: int, h: float) -> np.ndarray:
    """Composite-trapezoid weights for integrating kernel(tau) over n nodes.

    Node k sits at tau = k*h; the integration range is [0, (n-1)*h].
    """
    tau = np.arange(n) * h
    w = kernel(tau) * h
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@dataclass(frozen=True)
class DiffKernel:
    """Discretized derivative kernel: fixed weights for one (window, rate) pair.

    window_T is the effective span (n-1)/fs actually covered by the weights,
    which may differ slightly from the requested length when that is not a
    whole number of sample periods.
    """

    window_T: float
    fs: float
    weights: np.ndarray

    @property
    def n_samples(self) -> int:
        return len(self.weights)

    @property
    def delay(self) -> float:
        """Nominal estimation delay (half the window span)."""
        return 0.5 * self.window_T


def design_kernel(window_T: float, fs: float) -> DiffKernel:
    """Build derivative-estimation weights for a trailing window.

    The trapezoid weights are corrected so that sum(w) = 0 exactly
    (mean subtraction) and sum(w * tau_k) = 1 exactly (rescale), which
    makes the estimator exact on affine signals regardless of window size.
    """
    n = window_sample_count(window_T, fs)
    if n < 4:
        raise ValueError(
            f"window of {window_T} s at {fs} Hz holds only {n} samples; need at least 4"
        )
    h = 1.0 / fs
    t_eff = (n - 1) * h
    w = trapezoid_weights(lambda tau: (6.0 / t_eff**3) * (2.0 * tau - t_eff), n, h)
    w -= w.mean()
    tau = np.arange(n) * h
    w /= np.dot(w, tau)
    return DiffKernel(window_T=t_eff, fs=fs, weights=w)


class SampleWindow:
    """Fixed-capacity chronological buffer of uniformly spaced samples."""

    def __init__(self, capacity: int, fs: float):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.fs = fs
        self._values = np.zeros(capacity)
        self._count = 0
        self._head = 0  # index of the next write slot
        self._last_time: float | None = None

    def __len__(self) -> int:
        return self._count

    @property
    def full(self) -> bool:
        return self._count == self.capacity

    @property
    def last_time(self) -> float | None:
        return self._last_time

    def push(self, t: float, value: float) -> None:
        if self._last_time is not None:
            dt = t - self._last_time
            if abs(dt - 1.0 / self.fs) > _SPACING_TOL:
                raise ValueError(
                    f"sample at t={t} breaks uniform spacing: dt={dt}, expected {1.0 / self.fs}"
                )
        self._values[self._head] = value
        self._head = (self._head + 1) % self.capacity
        self._count = min(self._count + 1, self.capacity)
        self._last_time = t

    def values(self) -> np.ndarray:
        """Window contents, oldest first."""
        if not self.full:
            # no wraparound can have happened yet
            return self._values[: self._count].copy()
        return np.concatenate((self._values[self._head:], self._values[: self._head]))

    def times(self) -> np.ndarray:
        """Sample times matching values(), oldest first."""
        if self._last_time is None:
            return np.empty(0)
        h = 1.0 / self.fs
        return self._last_time - h * np.arange(self._count - 1, -1, -1)


def estimate_derivative(w: SampleWindow, k: DiffKernel) -> float:
    """Derivative estimate at the window's trailing edge.

    Raises InsufficientDataError until the window is full; the window must
    have been sampled at the kernel's rate.
    """
    if not w.full:
        raise InsufficientDataError(
            f"window holds {len(w)}/{w.capacity} samples; estimation needs a full window"
        )
    if w.capacity != k.n_samples or w.fs != k.fs:
        raise ValueError(
            f"window ({w.capacity} samples at {w.fs} Hz) does not match "
            f"kernel ({k.n_samples} samples at {k.fs} Hz)"
        )
    return float(np.dot(k.weights, w.values()))


class StreamingDifferentiator:
    """Owns one window and one kernel; feeds samples, returns estimates.

    update() returns None until the window first fills.
    """

    def __init__(self, window_T: float, fs: float):
        self.kernel = design_kernel(window_T, fs)
        self.window = SampleWindow(self.kernel.n_samples, fs)

    @property
    def ready(self) -> bool:
        return self.window.full

    def update(self, t: float, value: float) -> float | None:
        self.window.push(t, value)
        if not self.window.full:
            return None
        return estimate_derivative(self.window, self.kernel)
