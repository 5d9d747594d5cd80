"""Secret-key-rate analysis for measurement-device-independent QKD.

Discrete-variable and continuous-variable rate models over two-leg fibre
links with an untrusted relay, a Monte Carlo detector oracle for the DV
formulas, secret-key capacity bounds, and distance-sweep tooling with CSV,
JSON and SVG outputs.
"""
from .channel import (
    LinkBudget,
    RelayConfiguration,
    secret_key_capacity_bounds,
    split_total_distance,
    transmissivity_from_distance,
)
from .cv import (
    CvParams,
    CvRateBreakdown,
    asymptotic_rate,
    closed_form_rate,
    closed_form_rate_asymmetric,
    closed_form_rate_symmetric,
    general_rate,
    mutual_information,
    worst_case_holevo,
)
from .dv import (
    DvDetectorPreset,
    DvRateBreakdown,
    IntensityPair,
    binary_entropy,
    dv_rate,
    optimize_intensities,
    single_photon_error_x,
    single_photon_yield,
    wcp_gain_qber,
)
from .dv_mc import McEstimate, simulate_single_photon, simulate_wcp
from .gaussian import (
    EprSource,
    QuadratureCM,
    TwoModeAttack,
    attack_is_physical,
    bosonic_entropy,
    equivalent_noise,
    relay_conditional_state,
    symplectic_eigenvalues,
    von_neumann_entropy,
)
from .presets import CV_PRESETS, DV_PRESETS, PANELS
from .sweep import CurveRecord, SweepSpec, compare_curves, emit_outputs, run_sweep

__version__ = "0.1.0"

__all__ = [
    "LinkBudget", "RelayConfiguration", "secret_key_capacity_bounds",
    "split_total_distance", "transmissivity_from_distance",
    "CvParams", "CvRateBreakdown", "asymptotic_rate", "closed_form_rate",
    "closed_form_rate_asymmetric", "closed_form_rate_symmetric",
    "general_rate", "mutual_information", "worst_case_holevo",
    "DvDetectorPreset", "DvRateBreakdown", "IntensityPair", "binary_entropy",
    "dv_rate", "optimize_intensities", "single_photon_error_x",
    "single_photon_yield", "wcp_gain_qber",
    "McEstimate", "simulate_single_photon", "simulate_wcp",
    "EprSource", "QuadratureCM", "TwoModeAttack", "attack_is_physical",
    "bosonic_entropy", "equivalent_noise", "relay_conditional_state",
    "symplectic_eigenvalues", "von_neumann_entropy",
    "CV_PRESETS", "DV_PRESETS", "PANELS",
    "CurveRecord", "SweepSpec", "compare_curves", "emit_outputs", "run_sweep",
]
