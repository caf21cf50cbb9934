"""Frame decisions and certified bounds for Gabor systems with half-line windows."""
from .dominance import DominanceCertificate, certificate, certified_sigma_min_check, random_conforming_matrix
from .framecert import (
    FrameReport,
    Reason,
    Verdict,
    boundary_degeneration_demo,
    certify_lower_frame_bound,
    classify,
    empirical_frame_bounds,
    frame_operator_quadratic_form,
    incompleteness_witness,
)
from .grids import jittered_lattice, regular_lattice, semi_irregular, validate_semi_irregular
from .quadrature import gaussian_bump, indicator
from .ronshen import build_slice, dominance_report, fiber_offsets, reduced_upper_triangular, u_transform
from .spectral import extreme_singular_values, truncation_sweep
from .windows import (
    CauchyFourier,
    OneSidedExponential,
    Tabulated,
    TruncatedExponential,
    TruncatedLinear,
    boundary_profile,
    cauchy_transform_window,
    decay_ratio,
    window_value,
)

__version__ = "0.1.0"
