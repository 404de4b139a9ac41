"""Crossing bounds for supermartingales with monotone floors and thresholds,
the floor-hugger martingale that attains them, and explicit finite-time
law-of-the-iterated-logarithm envelopes, all validated against independent
quadrature and Monte Carlo oracles."""

from .curves import (
    Constant,
    Curve,
    Dampener,
    ExpConcaveThreshold,
    FatTailDampener,
    LilThreshold,
    LogFloor,
    PolynomialDampener,
    QuadraticThreshold,
    Tabulated,
    LIL_FLOOR_SCALE,
    curve_from_spec,
    dampener_from_spec,
    lil_floor,
    tabulated_from_csv,
)
from .errors import (
    AnytimeVilleError,
    CalibrationError,
    DomainError,
    ExtrapolationError,
    InvalidQuery,
    UnsupportedError,
)
from .floorhugger import (
    FloorHuggerConfig,
    PathRecord,
    SimSummary,
    floor_survival,
    jump_prob,
    k_process,
    s_values,
    sample_paths,
    simulate,
)
from .integrals import ExponentIntegral, exponent_integral
from .lil import (
    LilParams,
    LilState,
    ell,
    ell_prime,
    explicit_bound,
    i_direct,
    i_fast,
    i_sech,
    implicit_rhs,
    invert_threshold,
    kappa_rescale,
    martingale_value,
    remainder_r,
    simpler_bound,
)
from .simharness import (
    CoverageConfig,
    CoverageReport,
    MartingaleCheckReport,
    prior_scaled_envelope,
    run_coverage,
    run_martingale_check,
    sum_envelope,
)
from .ville import (
    BoundQuery,
    ContinuousBound,
    ProbBracket,
    calibrate_expconcave,
    calibrate_quadratic,
    calibrated_expconcave_threshold,
    calibrated_quadratic_threshold,
    continuous_bound,
    crossing_bound,
    s_tail,
)

__version__ = "0.1.0"
