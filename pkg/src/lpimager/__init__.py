"""Visual images of linear programs seen from receptive fields on the objective hyperplane."""
from .costmodel import (
    CostParams,
    FitReport,
    TimingSample,
    count_Fk,
    count_Map,
    fit_params,
    scalability_bound,
    scalability_bound_analytic,
)
from .field import (
    DEFAULT_CELL_CAP,
    BasisSet,
    FieldAxiomReport,
    FieldCapError,
    FieldOverflowError,
    FieldSpec,
    build_basis,
    check_field_axioms,
    count_G,
    enumerate_field,
    field_size,
    receptive_point,
)
from .generator import (
    GeneratorParams,
    ProblemBundle,
    ProblemFormatError,
    generate,
    read_problem,
    write_problem,
)
from .image import ImageBuildError, LpImage, build_image_sequential
from .model import (
    Box,
    LpProblem,
    ObjectiveFrame,
    ValidationReport,
    build_frame,
    distance_to_objective,
    is_recessive,
    membership,
    objective_value,
    ortho_project,
    validate_problem,
)
from .parallel import build_image_parallel
from .projection import (
    INF,
    ProjectionContext,
    SigmaInterval,
    f_k,
    gamma_halfspace,
    gamma_polytope,
    reduce_min,
    reduce_naive,
    sigma_interval,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
