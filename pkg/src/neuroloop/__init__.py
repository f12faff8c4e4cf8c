"""Closed-loop seizure-suppression simulation toolkit.

Wires a neural-mass virtual patient, a windowed algebraic derivative
estimator, an inter-maxima seizure detector and a model-free iPD
controller into reproducible scenario runs with CSV/SVG outputs.
"""

from .patient import (
    NeuralState,
    PatientParams,
    PerturbationProfile,
    SigmoidParams,
    derivatives,
    make_patient_variant,
    output_ym,
    perturbation,
    rk4_step,
    sigmoid,
)
from .diffest import (
    DiffKernel,
    InsufficientDataError,
    SampleWindow,
    StreamingDifferentiator,
    design_kernel,
    estimate_derivative,
)
from .detector import (
    DetectorConfig,
    MaximumEvent,
    SeizureDetector,
    SeizureState,
    detect_maximum,
    latest_interval,
    seizure_update,
)
from .mfc import (
    ConstantReference,
    Controller,
    ControllerConfig,
    RecordedReference,
    Reference,
    f_estimate,
    gains_admissible,
    ipd2_control,
    ipd_control,
    riachy_transform,
)

__version__ = "0.1.0"
