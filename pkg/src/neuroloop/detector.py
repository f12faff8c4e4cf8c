"""Real-time seizure detection from inter-maxima timing.

Maxima of the recorded signal show up as downward zero crossings of its
derivative estimate.  A two-threshold hysteresis (arm above the upper
threshold, fire at or below the lower one) keeps small ripples from
counting, so only large maxima register.  Seizures are flagged when
several consecutive inter-maxima intervals fall under a time threshold:
ictal activity packs large maxima close together.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .diffest import StreamingDifferentiator

__all__ = [
    "DetectorConfig",
    "MaximumEvent",
    "SeizureState",
    "detect_maximum",
    "latest_interval",
    "seizure_update",
    "MaximaDetector",
    "SeizureDetector",
]


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds and timing for the maxima/interval detector.

    upper_threshold / lower_threshold are in derivative units (arm and fire
    levels of the hysteresis); interval_threshold is the inter-maxima time
    below which activity counts as ictal; persistence is how many
    consecutive qualifying intervals are needed to toggle the flag;
    refractory is the minimum spacing between detected maxima.

    Numeric defaults are calibrated on the nominal virtual patient
    (baseline density 200, ictal 800) so that the reference open-loop run
    detects within 3 s of the switch with no false positives.
    """

    upper_threshold: float = 300.0
    lower_threshold: float = 0.0
    interval_threshold: float = 0.12
    persistence: int = 2
    refractory: float = 0.01
    window_T: float = 0.05

    def __post_init__(self):
        if self.upper_threshold <= 0:
            raise ValueError(f"upper_threshold must be > 0, got {self.upper_threshold}")
        if self.lower_threshold > 0:
            raise ValueError(f"lower_threshold must be <= 0, got {self.lower_threshold}")
        if self.persistence < 1:
            raise ValueError(f"persistence must be >= 1, got {self.persistence}")
        if self.refractory < 0:
            raise ValueError(f"refractory must be >= 0, got {self.refractory}")


@dataclass(frozen=True)
class MaximumEvent:
    time: float
    amplitude: float


@dataclass(frozen=True)
class SeizureState:
    """Seizure flag plus the hysteresis counters that drive it."""

    flag: bool = False
    since: float = 0.0
    below_count: int = 0
    above_count: int = 0


def detect_maximum(
    d_prev: float, d_curr: float, armed: bool, cfg: DetectorConfig
) -> tuple[bool, bool]:
    """One hysteresis transition on consecutive derivative estimates.

    Returns (fired, armed').  Arms when the derivative reaches the upper
    threshold; fires when armed and the derivative crosses from above the
    lower threshold to at or below it.  The refractory hold-off is applied
    by the stream wrapper, which knows event times.
    """
    fired = armed and d_prev > cfg.lower_threshold and d_curr <= cfg.lower_threshold
    armed = (armed and not fired) or d_curr >= cfg.upper_threshold
    return fired, armed


def latest_interval(events: list[MaximumEvent]) -> float:
    """Time between the two most recent maxima."""
    if len(events) < 2:
        raise ValueError(f"need at least 2 events, got {len(events)}")
    return events[-1].time - events[-2].time


def seizure_update(
    interval: float, t: float, state: SeizureState, cfg: DetectorConfig
) -> SeizureState:
    """Advance the flag hysteresis with one new inter-maxima interval.

    The flag sets after cfg.persistence consecutive intervals below the
    threshold and clears after the same count at or above it.
    """
    if interval < cfg.interval_threshold:
        below = state.below_count + 1
        if not state.flag and below >= cfg.persistence:
            return SeizureState(flag=True, since=t, below_count=below, above_count=0)
        return replace(state, below_count=below, above_count=0)
    above = state.above_count + 1
    if state.flag and above >= cfg.persistence:
        return SeizureState(flag=False, since=t, below_count=0, above_count=above)
    return replace(state, below_count=0, above_count=above)


class MaximaDetector:
    """Streaming maxima finder over a derivative-estimate sequence."""

    def __init__(self, cfg: DetectorConfig):
        self.cfg = cfg
        self.armed = False
        self._d_prev: float | None = None
        self.events: list[MaximumEvent] = []

    def update(self, t: float, d_est: float, amplitude: float) -> MaximumEvent | None:
        if self._d_prev is None:
            self._d_prev = d_est
            self.armed = d_est >= self.cfg.upper_threshold
            return None
        fired, self.armed = detect_maximum(self._d_prev, d_est, self.armed, self.cfg)
        self._d_prev = d_est
        if not fired:
            return None
        if self.events and t - self.events[-1].time < self.cfg.refractory:
            return None
        event = MaximumEvent(time=t, amplitude=amplitude)
        self.events.append(event)
        return event


class SeizureDetector:
    """Full detection pipeline: differentiate, find maxima, time them, flag.

    Feed the measured signal sample by sample; exposes the latest
    derivative estimate, inter-maxima interval and seizure flag.
    """

    def __init__(self, cfg: DetectorConfig, fs: float):
        self.cfg = cfg
        self.diff = StreamingDifferentiator(cfg.window_T, fs)
        self.maxima = MaximaDetector(cfg)
        self.state = SeizureState()
        self.d_est: float | None = None
        self.interval: float | None = None

    @property
    def flag(self) -> bool:
        return self.state.flag

    def update(self, t: float, y_meas: float) -> bool:
        """Process one sample; returns the current seizure flag."""
        d = self.diff.update(t, y_meas)
        self.d_est = d
        if d is None:
            return self.state.flag
        event = self.maxima.update(t, d, y_meas)
        if event is not None and len(self.maxima.events) >= 2:
            self.interval = latest_interval(self.maxima.events)
            self.state = seizure_update(self.interval, t, self.state, self.cfg)
        return self.state.flag
