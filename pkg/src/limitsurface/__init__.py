"""Data-driven planar friction limit surfaces.

Homogeneous polynomial models of the limit surface, fitted to force/motion
pairs with an optional sum-of-squares convexity certificate, plus the tools
that consume them: load inversion, stable-push classification and free
sliding simulation.
"""

from .errors import (
    ConvergenceError,
    FacetDegeneracyError,
    InfeasibleStartError,
    InvalidParameterError,
    LimitSurfaceError,
    UndefinedDirectionError,
)
from .identify import DEFAULT_GRID, KINDS, FitConfig, FitResult, assemble_objective, cross_validate, fit
from .inversion import InversionOptions, invert, invert_many
from .metrics import angular_error, angular_errors, confidence_halfwidth
from .oracle import (
    DataPair,
    Dataset,
    SupportConfig,
    add_noise,
    gen_dataset,
    gen_legged_support,
    gen_uniform_support,
    load_for_twist,
    sample_facet,
    split_dataset,
)
from .poly import (
    MonomialBasis,
    PolyModel,
    evaluate,
    gradient,
    hessian,
    isotropic_model,
    monomial_basis,
    predict_velocity_direction,
)
from .push import COR, PushContact, classify_cors, is_stable_push
from .sliding import GeneralizedMass, SlideState, Trajectory, simulate_sliding
from .solver import QuadraticObjective, SolverOptions, solve_quadratic_psd, solve_sdp, solve_unconstrained
from .sos import SosConstraintSystem, build_constraints, verify_certificate
from .study import StudyConfig, StudyReport, run_study
from .wrench import (
    BodyParams,
    GeneralizedLoad,
    GeneralizedVelocity,
    PoseSE2,
    embed_twist,
    embed_wrench,
)

__version__ = "0.1.0"
