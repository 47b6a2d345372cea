"""Halfspace M-depth: M-quantiles, depth regions, expectile depth and expectile risk."""

from .depth import (
    DepthResult,
    Sample,
    certificate_residual,
    circle_directions,
    count_profile_extrema,
    direction_grid,
    directional_outlyingness,
    expectile_depth,
    expectile_depth_2d_exact,
    mdepth_grid,
    outlyingness_profile,
    segment_certificate,
    sphere_directions,
)
from .errors import (
    DegenerateDenominator,
    EmptyRegion,
    InsufficientLocalData,
    InvalidData,
    MDepthError,
    NotConverged,
    OriginOutsideSupport,
    PreconditionViolated,
    RankDeficient,
    SeriesDiverged,
    ShapeMismatch,
)
from .geometry import Hyperplane, Region2D, intersect_halfplanes, region_contains, region_hausdorff
from .loss import LossSpec, check_order, parse_loss, psi_minus, rho_alpha, rho_eval
from .oracles import (
    EllipticalSpec,
    ed_gaussian,
    ed_uniform_ball,
    ed_uniform_interval,
    ed_uniform_pair,
    ed_uniform_sphere,
    gaussian_g,
    hyp2f1_series,
)
from .regions import (
    depth_region_2d,
    directional_intercepts,
    m_median,
    mquantile_hyperplane,
    support_radius,
    tukey_depth_2d_exact,
)
from .regression import (
    LinearEngine,
    LocalEngine,
    RegressionData,
    RegressionFit,
    conditional_halfspace,
    conditional_region_2d,
    linear_expectile_fit,
    local_expectile_fit,
    simulate_cigar,
    simulate_hetero,
)
from .risk import (
    RiskReport,
    check_homogeneity,
    check_monotonicity,
    check_subadditivity,
    check_superadditivity,
    check_translation,
    risk_halfspace,
    risk_intercept,
    upper_envelope_2d,
)
from .univariate import Series, expectile_exact, g_function, m_quantile, univariate_mdepth

__version__ = "0.1.0"
