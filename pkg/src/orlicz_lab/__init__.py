# orlicz-lab package
# Numerical checks for composition operators on Hardy-Orlicz and
# Bergman-Orlicz spaces of the unit ball.

from orlicz_lab.orlicz_core import (
    OrliczLabError,
    InverseOutOfRangeError,
    ExtrapolationError,
    GridTooSmallError,
    Family,
    Condition,
    Verdict,
    OrliczFunction,
    Power,
    ExpPower,
    LogExp,
    Tabulated,
    PiecewiseAffineInverse,
    ClassCertificate,
    set_witness_candidates,
    orlicz_from_spec,
    evaluate,
    log_evaluate,
    inverse,
    inverse_of_log,
    check_invariants,
    certify,
    certify_all,
    inverse_power_check,
    check_implications
)
from orlicz_lab.luxemburg import (
    NonFiniteSampleError,
    SampledFunction,
    modular,
    luxemburg_norm,
    hardy_norm_estimate,
    bergman_norm_estimate
)
from orlicz_lab.ball_geometry import (
    BallPoint,
    KoranyiRegion,
    CarlesonWindow,
    Closure,
    Corona,
    MeasureKind,
    MeasureSpec,
    n_alpha,
    in_koranyi,
    in_window,
    koranyi_aperture_bound,
    bergman_normalizer,
    radius_cdf,
    sample_sphere,
    sample_ball_weighted,
    sample_localized_box,
    sample_localized_arc,
    export_samples_csv
)
from orlicz_lab.symbol_maps import (
    SelfMapViolation,
    SymbolFamily,
    SymbolMap,
    Constant,
    Dilation,
    DiagonalLinear,
    LensFamily,
    Lens1D,
    EmbeddedLens,
    symbol_from_spec,
    apply,
    radial_restriction,
    boundary_limit,
    sup_norm_estimate,
    beta_from_aperture,
    aperture_from_beta,
    containing_region,
    estimate_contact_aperture,
    check_contact_containment
)
from orlicz_lab.carleson_profiles import (
    WindowMass,
    ProfileRecord,
    CarlesonProfile,
    bergman_window_mass,
    hardy_window_mass,
    corona_mass,
    build_profile,
    profile_slope
)
from orlicz_lab.compactness_criteria import (
    CriterionId,
    CarlesonMode,
    CriterionReport,
    Battery,
    psi_carleson_fit,
    boundary_ratio_alpha,
    boundary_ratio_simplified,
    classical_angular_ratio,
    h_infty_compact,
    lens_exponent_check,
    delta2sharp_sufficiency,
    bergman_sufficiency_check,
    koranyi_aperture_verdict,
    consistency_rows,
    run_battery
)
from orlicz_lab.concave_builder import (
    DomainExhaustedError,
    MonotoneFunctionSpec,
    BreakpointSequence,
    ConcaveMajorant,
    build_sequence,
    build_v,
    ratio_delta,
    check_properties,
    orlicz_from_v,
    profile_reciprocal,
    majorant_for_profile
)


__all__ = [
    "OrliczLabError",
    "InverseOutOfRangeError",
    "ExtrapolationError",
    "GridTooSmallError",
    "Family",
    "Condition",
    "Verdict",
    "OrliczFunction",
    "Power",
    "ExpPower",
    "LogExp",
    "Tabulated",
    "PiecewiseAffineInverse",
    "ClassCertificate",
    "set_witness_candidates",
    "orlicz_from_spec",
    "evaluate",
    "log_evaluate",
    "inverse",
    "inverse_of_log",
    "check_invariants",
    "certify",
    "certify_all",
    "inverse_power_check",
    "check_implications",
    "NonFiniteSampleError",
    "SampledFunction",
    "modular",
    "luxemburg_norm",
    "hardy_norm_estimate",
    "bergman_norm_estimate",
    "BallPoint",
    "KoranyiRegion",
    "CarlesonWindow",
    "Closure",
    "Corona",
    "MeasureKind",
    "MeasureSpec",
    "n_alpha",
    "in_koranyi",
    "in_window",
    "koranyi_aperture_bound",
    "bergman_normalizer",
    "radius_cdf",
    "sample_sphere",
    "sample_ball_weighted",
    "sample_localized_box",
    "sample_localized_arc",
    "export_samples_csv",
    "SelfMapViolation",
    "SymbolFamily",
    "SymbolMap",
    "Constant",
    "Dilation",
    "DiagonalLinear",
    "LensFamily",
    "Lens1D",
    "EmbeddedLens",
    "symbol_from_spec",
    "apply",
    "radial_restriction",
    "boundary_limit",
    "sup_norm_estimate",
    "beta_from_aperture",
    "aperture_from_beta",
    "containing_region",
    "estimate_contact_aperture",
    "check_contact_containment",
    "WindowMass",
    "ProfileRecord",
    "CarlesonProfile",
    "bergman_window_mass",
    "hardy_window_mass",
    "corona_mass",
    "build_profile",
    "profile_slope",
    "CriterionId",
    "CarlesonMode",
    "CriterionReport",
    "Battery",
    "psi_carleson_fit",
    "boundary_ratio_alpha",
    "boundary_ratio_simplified",
    "classical_angular_ratio",
    "h_infty_compact",
    "lens_exponent_check",
    "delta2sharp_sufficiency",
    "bergman_sufficiency_check",
    "koranyi_aperture_verdict",
    "consistency_rows",
    "run_battery",
    "DomainExhaustedError",
    "MonotoneFunctionSpec",
    "BreakpointSequence",
    "ConcaveMajorant",
    "build_sequence",
    "build_v",
    "ratio_delta",
    "check_properties",
    "orlicz_from_v",
    "profile_reciprocal",
    "majorant_for_profile"
]
__version__ = "1.0.0"
