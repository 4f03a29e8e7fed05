"""Diamond-covering volume measures, geometric dimension and doubling
constants on model Lorentzian spaces."""

from .core import CausalDiamond, CausalSpace, as_point, make_diamond, omega, rho
from .spaces import (
    BoxRegion,
    CurveRegion,
    DegenerateBasisError,
    LinearSubspace,
    MinkowskiSpace,
    PiecewiseLinearCurve,
    PointCloudRegion,
    SubspaceCubeRegion,
    SubspaceRestriction,
    classify_subspace,
    lorentz_boost,
    restrict_to_subspace,
)
from .measure import (
    BracketNotFoundError,
    Cover,
    DimensionEstimate,
    GeneratorError,
    MassDistribution,
    ScalingSeries,
    UnverifiedCoverError,
    box_cover,
    cover_cost,
    curve_chain_cover,
    estimate_dimension,
    grid_cover,
    length_on_curve,
    lower_measure,
    null_cover,
    point_cover,
    uniform_on_box,
    uniform_on_cube,
    upper_measure,
)
from .curves import (
    InvalidCurveError,
    PartitionSumTrace,
    compare_length_measure,
    is_null_curve,
    partition_sum,
    tau_length,
)
from .chart import (
    ChartMetric,
    ConeSandwich,
    CylindricalNeighborhood,
    InvalidMetricError,
    ResolutionError,
    diamond_volume,
    dimension_bound_from_doubling,
    doubling_constant,
    dp_time_separation,
    enlarge_diamond,
    measure_ratio_check,
    metric_field,
    sup_metric_deviation,
    verify_cone_sandwich,
    volume_density_check,
)
from .comparison import (
    bg_monotonicity_probe,
    bg_ratio_bound,
    dimension_consistency_assert,
    s_K,
    tcd_doubling_constant,
)

__version__ = "0.1.0"
