"""Pseudo-spectral solver and harmonic-analysis toolkit for the coupled
incompressible-flow / charge-transport system on the periodic torus."""

from .errors import (
    CflError,
    ConfigError,
    EnppError,
    GridError,
    NonNeutralError,
)
from .spectral import (
    Field,
    Grid,
    VectorField,
    dealias,
    derivative,
    divergence,
    gradient,
    laplacian,
    lp_norm,
    lp_norm_vector,
    make_grid,
    mean,
    product,
    transform,
)
from .littlewood_paley import (
    BesovSpec,
    DyadicPartition,
    besov_norm,
    build_partition,
    check_bernstein,
    dyadic_block,
    get_partition,
    low_freq_cutoff,
    timespace_besov_norm,
)
from .operators import (
    bony_decompose,
    commutator,
    grad_inv_laplacian,
    leray_project,
    paraproduct,
    pi_bilinear,
    pi_divergence_identity,
    remainder,
    solve_potential,
)
from .dynamics import (
    IterationReport,
    NormIndices,
    SimState,
    Trajectory,
    heat_propagate,
    lifespan_lower_bound,
    picard_solve,
    rhs_enpp,
    rhs_modified,
    simulate,
    step,
)
from .diagnostics import (
    BlowupMonitor,
    InvariantReport,
    besov_trajectory,
    blowup_monitor,
    invariant_report,
)
from .config import RunConfig, parse_config
from .experiments import (
    RateFit,
    inviscid_experiment,
    run_iteration,
    run_simulation,
)

__version__ = "0.1.0"
