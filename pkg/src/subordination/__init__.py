"""Subordinated Markov processes: Brownian-time, inverse-stable and stable-time clocks.

The package samples the random clocks, evaluates their densities, solves the
associated Cauchy problems by quadrature over the clock, and verifies the
equivalences (and non-equivalences) between them.
"""

from .density import (
    MittagLefflerParams,
    StableDensityParams,
    inverse_subordinator_density,
    mittag_leffler,
    stable_subordinator_density,
    symmetric_stable_density,
    talbot_inverse,
)
from .errors import (
    AccuracyError,
    DegenerateSampleError,
    DomainError,
    EmptyRequestError,
    EvaluationError,
    GridError,
    InsufficientHorizonError,
    ParameterError,
    RangeError,
    SubordinationError,
)
from .sampling import (
    AlphaTime,
    BrownianTime,
    InverseStable,
    IteratedBM,
    RngStream,
    SamplePath,
    TimeGrid,
    TwoSidedPath,
    invert_subordinator_path,
    sample_gaussian,
    sample_inverse_subordinator,
    sample_stable_subordinator,
    sample_subordinated,
    sample_symmetric_stable,
    simulate_path,
)
from .semigroup import (
    Eigenfunction,
    FourierMultiplier,
    HeatKernel,
    SpatialGrid,
    apply_generator_power,
    apply_semigroup,
)
from .solver import (
    QuadratureConfig,
    SolutionValue,
    solve_alpha_time,
    solve_brownian_time,
    solve_fractional_subordination,
)
from .verify import (
    EmpiricalDistribution,
    KSResult,
    ResidualReport,
    TailFitReport,
    caputo_derivative,
    caputo_refinement,
    chi_square_gof,
    integrate_density,
    ks_critical_value,
    ks_statistic,
    laplace_transform_of_density,
    residual_alpha_time_pde,
    residual_fractional,
    residual_ibm_pde,
    residual_n_order,
    stable_kernel_pde_residual,
    tail_drift,
    tail_exponent,
)

__version__ = "0.1.0"
