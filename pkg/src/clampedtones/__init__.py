"""Clamped-plate fundamental tones of geodesic balls in hyperbolic space forms."""

from .errors import DomainError, EvaluationError, PoleError, SolverError, ToneError
from .geometry import (
    SpaceForm,
    TwoBallConfig,
    ball_volume,
    beta_from_alpha,
    half_volume_radius,
    radius_of_tilde,
    tilde_of_radius,
)
from .specfun import (
    HyperParams,
    OscillationKind,
    OscillationVerdict,
    bessel_first_zero,
    bessel_pair,
    classify_w_minus,
    cross_product_root,
    hyper_G,
    hyper_G_prime,
)
from .tones import (
    EigenProfile,
    Method,
    ToneResult,
    K_nu,
    ashbaugh_laugesen_Dn,
    cheng_yang_upper,
    eigenfunction_profile,
    fundamental_tone,
    mckean_floor,
    pole_g,
    sharpness_gap,
    threshold_radius,
    tone_asymptotic_large_3d,
    tone_asymptotic_small,
    two_ball_tone,
)

__version__ = "0.1.0"
