"""Stimulated Wendling-type neural mass model used as the virtual patient.

The model is a single cortical column with four interacting populations
(pyramidal cells, excitatory feedback, slow and fast inhibitory
interneurons).  It is written as five second-order ODEs, integrated here
as a 10-dimensional first-order system with classical RK4.

State vector layout (shape ``(10,)``):

    state[0:5]  -> y0..y4   post-synaptic potentials (mV)
    state[5:10] -> dy0..dy4 their time derivatives (mV/s)

The recorded output is ``ym = y1 - y2 - y3``, the summed potential seen by
the pyramidal population.  An external pulse density ``p`` drives the
excitatory feedback loop and an electrical stimulation ``u`` adds to the
membrane potential inside every sigmoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "SigmoidParams",
    "PatientParams",
    "NeuralState",
    "PerturbationProfile",
    "sigmoid",
    "derivatives",
    "rk4_step",
    "output_ym",
    "perturbation",
    "make_patient_variant",
]


@dataclass(frozen=True)
class SigmoidParams:
    """Potential-to-firing-rate sigmoid constants.

    v_max : maximum firing rate (1/s)
    v0    : firing threshold potential (mV)
    r     : steepness (1/mV)
    """

    v_max: float = 5.0
    v0: float = 6.0
    r: float = 0.56

    def __post_init__(self):
        if self.v_max <= 0:
            raise ValueError(f"v_max must be > 0, got {self.v_max}")
        if self.r <= 0:
            raise ValueError(f"r must be > 0, got {self.r}")


@dataclass(frozen=True)
class PatientParams:
    """All constants defining one virtual patient.

    A, B, G are the average excitatory, slow-inhibitory and fast-inhibitory
    post-synaptic gains (mV); a, b, g the matching reciprocal time constants
    (1/s); C1..C7 the dimensionless connectivity constants.
    """

    A: float = 3.25
    B: float = 22.0
    G: float = 20.0
    a: float = 100.0
    b: float = 30.0
    g: float = 350.0
    C1: float = 135.0
    C2: float = 0.8 * 135.0
    C3: float = 0.25 * 135.0
    C4: float = 0.25 * 135.0
    C5: float = 0.3 * 135.0
    C6: float = 0.1 * 135.0
    C7: float = 0.8 * 135.0
    sigmoid: SigmoidParams = field(default_factory=SigmoidParams)

    def __post_init__(self):
        for name in ("A", "B", "G", "a", "b", "g", "C1", "C2", "C3", "C4", "C5", "C6", "C7"):
            value = getattr(self, name)
            if value <= 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")

    @classmethod
    def nominal(cls, C1: float = 135.0) -> "PatientParams":
        """Standard parameter set with the connectivity ladder derived from C1."""
        return cls(
            C1=C1,
            C2=0.8 * C1,
            C3=0.25 * C1,
            C4=0.25 * C1,
            C5=0.3 * C1,
            C6=0.1 * C1,
            C7=0.8 * C1,
        )


@dataclass
class NeuralState:
    """Structured view of the 10-dimensional state vector."""

    y0: float = 0.0
    y1: float = 0.0
    y2: float = 0.0
    y3: float = 0.0
    y4: float = 0.0
    dy0: float = 0.0
    dy1: float = 0.0
    dy2: float = 0.0
    dy3: float = 0.0
    dy4: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.y0, self.y1, self.y2, self.y3, self.y4,
             self.dy0, self.dy1, self.dy2, self.dy3, self.dy4],
            dtype=float,
        )

    @classmethod
    def from_array(cls, state: np.ndarray) -> "NeuralState":
        return cls(*(float(v) for v in state))


@dataclass(frozen=True)
class PerturbationProfile:
    """Switching excitatory input: pulse density plus per-sample Gaussian noise.

    The density is ``baseline`` up to and including ``switch_time`` and
    ``elevated`` after it.  ``seed`` pins the noise stream; the harness
    derives one from the scenario seed when left as None.
    """

    baseline: float = 200.0
    elevated: float = 800.0
    switch_time: float = 2.0
    noise_sd: float = 10.0
    seed: int | None = None


def sigmoid(v: float, sp: SigmoidParams) -> float:
    """Firing rate for membrane potential ``v`` (mV), bounded in (0, v_max)."""
    x = sp.r * (sp.v0 - v)
    # exp overflows for very negative v; the limit is exactly 0.
    if x > 700.0:
        return 0.0
    return sp.v_max / (1.0 + math.exp(x))


def derivatives(state: np.ndarray, u: float, p: float, pp: PatientParams) -> np.ndarray:
    """Right-hand side of the 10-dimensional first-order system.

    ``u`` is the stimulation (mV), added inside every sigmoid argument;
    ``p`` is the excitatory pulse density (1/s), driving the y1 loop.
    """
    y0, y1, y2, y3, y4, dy0, dy1, dy2, dy3, dy4 = state.tolist()
    sp = pp.sigmoid
    A, a, B, b, G, g = pp.A, pp.a, pp.B, pp.b, pp.G, pp.g

    ddy0 = A * a * sigmoid(u + y1 - y2 - y3, sp) - 2.0 * a * dy0 - a * a * y0
    ddy1 = A * a * (p + pp.C2 * sigmoid(u + pp.C1 * y0, sp)) - 2.0 * a * dy1 - a * a * y1
    ddy2 = B * b * pp.C4 * sigmoid(u + pp.C3 * y0, sp) - 2.0 * b * dy2 - b * b * y2
    ddy3 = G * g * pp.C7 * sigmoid(u + pp.C5 * y0 - y4, sp) - 2.0 * g * dy3 - g * g * y3
    ddy4 = B * b * pp.C6 * sigmoid(u + pp.C3 * y0, sp) - 2.0 * b * dy4 - b * b * y4

    return np.array([dy0, dy1, dy2, dy3, dy4, ddy0, ddy1, ddy2, ddy3, ddy4])


def rk4_step(state: np.ndarray, u: float, p: float, dt: float, pp: PatientParams) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step with u and p held constant."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    k1 = derivatives(state, u, p, pp)
    k2 = derivatives(state + 0.5 * dt * k1, u, p, pp)
    k3 = derivatives(state + 0.5 * dt * k2, u, p, pp)
    k4 = derivatives(state + dt * k3, u, p, pp)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Kept as the spec-facing alias; dt -> 0 is the identity to machine precision.
step = rk4_step


def output_ym(state: np.ndarray) -> float:
    """Recorded signal: summed potential at the pyramidal population."""
    return float(state[1] - state[2] - state[3])


def perturbation(t: float, profile: PerturbationProfile, rng: np.random.Generator) -> float:
    """Pulse density at time t: switching mean plus one Gaussian draw.

    The caller holds the returned value constant over one sample period,
    so the draw order (one per sample) fixes the noise sequence given the
    generator's seed.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    mean = profile.baseline if t <= profile.switch_time else profile.elevated
    if profile.noise_sd == 0.0:
        return mean
    return mean + profile.noise_sd * rng.standard_normal()


def make_patient_variant(pp: PatientParams, c_scale: float) -> PatientParams:
    """New patient with every connectivity constant C1..C7 scaled by c_scale."""
    if c_scale <= 0:
        raise ValueError(f"c_scale must be > 0, got {c_scale}")
    return replace(
        pp,
        C1=pp.C1 * c_scale,
        C2=pp.C2 * c_scale,
        C3=pp.C3 * c_scale,
        C4=pp.C4 * c_scale,
        C5=pp.C5 * c_scale,
        C6=pp.C6 * c_scale,
        C7=pp.C7 * c_scale,
    )
