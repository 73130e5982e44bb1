"""Scaled number structures, universe-tagged values on a flat chart, and scaled calculus."""

from .calculus import (
    FieldOnChart,
    GaugeLink,
    WavePacket,
    const_field,
    covariant_consistency_check,
    covariant_derivative,
    covariant_limit,
    distance_table,
    du_invariance_check,
    exp_field,
    gaussian_field,
    integral_error_estimate,
    integrand_dump,
    lifted_global_integral,
    linear_field,
    local_integral,
    polynomial_field,
    scaled_distance_element,
    scaled_wave_packet,
)
from .charts import (
    AffineChart,
    CallableChart,
    ChartFamily,
    IdentityChart,
    TaggedCoordinate,
    TanhChart,
    UniverseTag,
    chart_apply,
    chart_invert,
    make_chart,
    same_chart_check,
    transport_point,
)
from .errors import (
    ChartRangeError,
    ConfigError,
    CrossUniverseError,
    DimensionMismatchError,
    DomainError,
    IntegrandError,
    ScaledArithmeticError,
    ScaledFieldsError,
    ScaleMismatchError,
    ScaleOverflowError,
)
from .linear import ScaledVector, add_vec_r, hilbert_iso_check, inner_r, make_vector, norm_r, smul_r
from .maps import (
    StructureMap,
    factorization_check,
    rescale,
    same_value_map,
    scaled_representation,
    scaling_map,
    transport_map,
)
from .numbers import (
    COS,
    EXP,
    IDENTITY,
    SIN,
    AnalyticFn,
    ScaledScalar,
    add_r,
    apply_analytic_r,
    div_r,
    make_scaled,
    mul_r,
    one_r,
    sub_r,
    value,
    zero_r,
)
from .quadrature import QuadratureSpec
from .reports import CheckReport
from .theta import (
    CallableTheta,
    ConstantTheta,
    GaussianBump,
    InflationTheta,
    LinearTheta,
    LogLinearTheta,
    ThetaField,
    grad_theta,
    make_theta,
    scale_factor,
    theta_at,
)

__version__ = "0.1.0"
