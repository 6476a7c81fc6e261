"""B-free weak model sets: profinite residue arithmetic, Mirsky frequencies,
reconstruction of the internal point, proximality probes and rotation codings."""

from .config import Patch, agreement_length, exact_patch, generic_patch, patch_from_text, shift
from .errors import DomainError
from .megf import determining_radius, equivariance_check, joint_determining_radius, reconstruct
from .mirsky import (
    CylinderFrequency,
    PatternQuery,
    birkhoff_count,
    density,
    empirical_frequency,
    pattern_frequency_exact,
    tail_error,
)
from .proximal import best_agreement, disagreement_density, find_agreement_window
from .rotation import (
    CircleIntervalSet,
    RotationSystem,
    arc_length,
    block_ones_stats,
    build_E,
    code_point,
    convolve_sample,
    injectivity_probe,
    union_measure,
)
from .scheme import (
    DEFAULT_WINDOW,
    CylinderConstraint,
    ModuliSet,
    Scheme,
    TruncatedInternalPoint,
    Window,
    cylinder_measure,
    delta_embed,
    haar_sample,
    load_scheme,
    validate_moduli,
    window_contains,
    window_period_group,
)

__version__ = "0.1.0"

__all__ = [
    "CircleIntervalSet",
    "CylinderConstraint",
    "CylinderFrequency",
    "DEFAULT_WINDOW",
    "DomainError",
    "ModuliSet",
    "Patch",
    "PatternQuery",
    "RotationSystem",
    "Scheme",
    "TruncatedInternalPoint",
    "Window",
    "agreement_length",
    "arc_length",
    "best_agreement",
    "birkhoff_count",
    "block_ones_stats",
    "build_E",
    "code_point",
    "convolve_sample",
    "cylinder_measure",
    "delta_embed",
    "density",
    "determining_radius",
    "disagreement_density",
    "empirical_frequency",
    "equivariance_check",
    "exact_patch",
    "find_agreement_window",
    "generic_patch",
    "haar_sample",
    "injectivity_probe",
    "joint_determining_radius",
    "load_scheme",
    "patch_from_text",
    "pattern_frequency_exact",
    "reconstruct",
    "shift",
    "tail_error",
    "union_measure",
    "validate_moduli",
    "window_contains",
    "window_period_group",
]
