"""Model-free control: ultra-local model estimation and the iPD laws.

The plant is treated over short windows as ``y'' = F + alpha * u`` where F
lumps everything unknown.  F is estimated by two fixed windowed integral
kernels over the recent output and control histories (the same quadrature
machinery as the derivative estimator), and the control cancels it while
imposing second-order error dynamics::

    u = -(F_est - ddy* + K_P e + K_D e_dot) / alpha          (iPD)

A second variant avoids differentiating the output by working with the
transformed signal Y = y + K_D * integral(y): its second derivative
absorbs the K_D e_dot term, giving::

    u = -(Fcal_est - ddy* + K_P e + K_D dy*) / alpha         (iPD2)

Gains are admissible when s^2 + K_D s + K_P is Hurwitz, i.e. both positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .diffest import (
    InsufficientDataError,
    SampleWindow,
    StreamingDifferentiator,
    trapezoid_weights,
    window_sample_count,
)

__all__ = [
    "ControllerConfig",
    "Reference",
    "ConstantReference",
    "RecordedReference",
    "ExhaustedReferenceError",
    "gains_admissible",
    "design_f_kernels",
    "f_estimate",
    "ipd_control",
    "ipd2_control",
    "riachy_transform",
    "OutputIntegrator",
    "Controller",
]


def gains_admissible(kp: float, kd: float) -> bool:
    """True iff every root of s^2 + kd*s + kp has negative real part."""
    return kp > 0 and kd > 0


@dataclass(frozen=True)
class ControllerConfig:
    """Gains and estimation settings for one control loop.

    alpha scales the control channel (sign included and deliberately
    rough); tau is the span of the F-estimation windows; mode selects the
    control law; u_min/u_max are actuator saturation bounds.
    """

    alpha: float
    kp: float
    kd: float
    tau: float = 0.04
    mode: str = "ipd"
    u_min: float = -50.0
    u_max: float = 50.0

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not gains_admissible(self.kp, self.kd):
            raise ValueError(
                f"inadmissible gains kp={self.kp}, kd={self.kd}: "
                "both must be strictly positive"
            )
        if self.mode not in ("ipd", "ipd2"):
            raise ValueError(f"mode must be 'ipd' or 'ipd2', got {self.mode!r}")
        if self.u_min >= self.u_max:
            raise ValueError(f"u_min {self.u_min} must be below u_max {self.u_max}")


@dataclass(frozen=True)
class Reference:
    """Reference value and its first two derivatives at one instant."""

    y: float
    dy: float = 0.0
    ddy: float = 0.0


class ExhaustedReferenceError(Exception):
    """Raised when a recorded reference is read past its stored range."""


class ConstantReference:
    def __init__(self, value: float):
        self.value = value

    def at(self, t: float) -> Reference:
        return Reference(y=self.value)


class RecordedReference:
    """Pre-simulated trace of (y, dy, ddy) sampled at a fixed rate."""

    def __init__(self, fs: float, y: np.ndarray, dy: np.ndarray, ddy: np.ndarray):
        if not (len(y) == len(dy) == len(ddy)):
            raise ValueError("y, dy, ddy traces must have equal length")
        self.fs = fs
        self.y = np.asarray(y, dtype=float)
        self.dy = np.asarray(dy, dtype=float)
        self.ddy = np.asarray(ddy, dtype=float)

    def at(self, t: float) -> Reference:
        i = int(round(t * self.fs))
        if i < 0 or i >= len(self.y):
            raise ExhaustedReferenceError(
                f"t={t} outside recorded reference range [0, {(len(self.y) - 1) / self.fs}]"
            )
        return Reference(y=float(self.y[i]), dy=float(self.dy[i]), ddy=float(self.ddy[i]))


@lru_cache(maxsize=32)
def design_f_kernels(tau: float, fs: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed weight vectors realizing the two F-estimation integrals.

    Returns (w_y, w_u) for a trailing window of n samples: the output
    kernel (60/tau^5)(tau^2 + 6 s^2 - 6 tau s) corrected to annihilate
    constants and slopes and return exactly y'' on quadratics; the control
    kernel (30/tau^5)(tau - s)^2 s^2 normalized to unit mass so constant
    control contributes exactly -alpha*u.  Weights depend only on
    (tau, fs), never on data.
    """
    n = window_sample_count(tau, fs)
    if n < 4:
        raise ValueError(f"tau of {tau} s at {fs} Hz holds only {n} samples; need at least 4")
    h = 1.0 / fs
    t_eff = (n - 1) * h
    s = np.arange(n) * h

    w_y = trapezoid_weights(
        lambda x: (60.0 / t_eff**5) * (t_eff**2 + 6.0 * x**2 - 6.0 * t_eff * x), n, h
    )
    # Minimal-norm correction pinning the first three moments: exactness on
    # all polynomials up to degree 2.  Basis scaled to the window for
    # conditioning.
    v = np.column_stack((np.ones(n), s / t_eff, (s / t_eff) ** 2))
    target = np.array([0.0, 0.0, 2.0 / t_eff**2])
    defect = target - v.T @ w_y
    w_y = w_y + v @ np.linalg.solve(v.T @ v, defect)

    w_u = trapezoid_weights(lambda x: (30.0 / t_eff**5) * (t_eff - x) ** 2 * x**2, n, h)
    w_u /= w_u.sum()
    return w_y, w_u


def f_estimate(y_window: SampleWindow, u_window: SampleWindow, tau: float, alpha: float) -> float:
    """Windowed estimate of F in y'' = F + alpha*u from aligned histories."""
    if not (y_window.full and u_window.full):
        raise InsufficientDataError("F estimation needs full output and control windows")
    if y_window.fs != u_window.fs or y_window.capacity != u_window.capacity:
        raise ValueError("output and control windows must share rate and capacity")
    if y_window.last_time != u_window.last_time:
        raise ValueError(
            f"misaligned windows: output ends at {y_window.last_time}, "
            f"control at {u_window.last_time}"
        )
    w_y, w_u = design_f_kernels(tau, y_window.fs)
    if len(w_y) != y_window.capacity:
        raise ValueError(
            f"windows hold {y_window.capacity} samples but tau={tau} "
            f"at {y_window.fs} Hz needs {len(w_y)}"
        )
    return float(np.dot(w_y, y_window.values()) - alpha * np.dot(w_u, u_window.values()))


def ipd_control(
    f_est: float, ref: Reference, e: float, e_dot: float, cfg: ControllerConfig
) -> float:
    """iPD law: cancel the F estimate, impose second-order error decay."""
    u = -(f_est - ref.ddy + cfg.kp * e + cfg.kd * e_dot) / cfg.alpha
    return min(max(u, cfg.u_min), cfg.u_max)


def ipd2_control(fcal_est: float, ref: Reference, e: float, cfg: ControllerConfig) -> float:
    """Derivative-free iPD variant on the integral-transformed output."""
    u = -(fcal_est - ref.ddy + cfg.kp * e + cfg.kd * ref.dy) / cfg.alpha
    return min(max(u, cfg.u_min), cfg.u_max)


def riachy_transform(times: np.ndarray, values: np.ndarray, kd: float) -> np.ndarray:
    """Transformed output Y = y + kd * integral(y) over a sampled history.

    The integral runs from the first sample, accumulated by the trapezoid
    rule; Y''(t) = y''(t) + kd*y'(t) for smooth y.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(times) != len(values):
        raise ValueError("times and values must have equal length")
    if len(values) == 0:
        return np.empty(0)
    increments = 0.5 * np.diff(times) * (values[1:] + values[:-1])
    integral = np.concatenate(([0.0], np.cumsum(increments)))
    return values + kd * integral


class OutputIntegrator:
    """Streaming form of the output transform Y = y + kd * integral(y)."""

    def __init__(self, kd: float):
        self.kd = kd
        self._integral = 0.0
        self._prev: tuple[float, float] | None = None

    def update(self, t: float, y: float) -> float:
        if self._prev is not None:
            t_prev, y_prev = self._prev
            self._integral += 0.5 * (t - t_prev) * (y + y_prev)
        self._prev = (t, y)
        return y + self.kd * self._integral


class Controller:
    """Per-sample control loop: windows, F estimation and the control law.

    Call update() once per sample with the measured output.  The previously
    applied control is pushed into the control window at the new sample
    time (zero-order hold: that value was in effect up to this instant),
    keeping the output and control histories aligned.  While inactive the
    output is zero but all windows keep filling, so estimates are live the
    moment the loop engages.
    """

    def __init__(self, cfg: ControllerConfig, fs: float, reference):
        self.cfg = cfg
        self.fs = fs
        self.reference = reference
        n = window_sample_count(cfg.tau, fs)
        self.y_window = SampleWindow(n, fs)
        self.u_window = SampleWindow(n, fs)
        self.Y_window = SampleWindow(n, fs)
        self._transform = OutputIntegrator(cfg.kd)
        self._e_diff = StreamingDifferentiator(cfg.tau, fs)
        self.last_u = 0.0
        self.f_est: float | None = None

    def update(
        self,
        t: float,
        y_meas: float,
        active: bool,
        f_override: float | None = None,
        e_dot_override: float | None = None,
    ) -> float:
        """Advance one sample; returns the control to apply until the next.

        f_override / e_dot_override substitute exact values (from simulator
        internals) for the windowed estimates; used by validation harnesses.
        """
        self.y_window.push(t, y_meas)
        self.Y_window.push(t, self._transform.update(t, y_meas))
        self.u_window.push(t, self.last_u)

        ref = self.reference.at(t)
        e = y_meas - ref.y
        e_dot = self._e_diff.update(t, e)

        u = 0.0
        self.f_est = None
        if active:
            if self.cfg.mode == "ipd":
                f_est = (
                    f_override
                    if f_override is not None
                    else self._windowed_f(self.y_window)
                )
                if e_dot_override is not None:
                    e_dot = e_dot_override
                if f_est is not None and e_dot is not None:
                    self.f_est = f_est
                    u = ipd_control(f_est, ref, e, e_dot, self.cfg)
            else:
                fcal_est = (
                    f_override
                    if f_override is not None
                    else self._windowed_f(self.Y_window)
                )
                if fcal_est is not None:
                    self.f_est = fcal_est
                    u = ipd2_control(fcal_est, ref, e, self.cfg)

        self.last_u = u
        return u

    def _windowed_f(self, signal_window: SampleWindow) -> float | None:
        if not (signal_window.full and self.u_window.full):
            return None
        return f_estimate(signal_window, self.u_window, self.cfg.tau, self.cfg.alpha)
