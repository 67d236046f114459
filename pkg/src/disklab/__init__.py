"""disklab: a numerical laboratory for iterating holomorphic self-maps of
the unit disk.

Core surfaces: Poincare geometry (``geometry``), a typed map DSL (``maps``),
orbit dynamics and Denjoy-Wolff classification (``dynamics``), left
straightening (``straightening``), Valiron ratio and slope limits
(``valiron``), a ground-truth map catalog (``catalog``) and the verification
suite (``suite``).
"""

__version__ = "0.1.0"

from .geometry import (
    AutFitError,
    DomainError,
    MobiusAut,
    Model,
    Point,
    aut_apply,
    aut_compose,
    aut_inverse,
    aut_sending_center_to,
    cayley,
    cayley_inverse,
    disk_aut_through_three_points,
    poincare_disk,
    poincare_halfplane,
)
from .maps import (
    Blaschke,
    Cayley,
    Compose,
    DiskAut,
    EvalError,
    HNudge,
    HScale,
    HShift,
    InvCayley,
    Iterate,
    MapConstraintError,
    MapExpr,
    MapTypeError,
    ParseError,
    Rot,
    codomain,
    compile_map,
    derivative,
    domain,
    evaluate,
    format_map,
    is_endo,
    iterate_eval,
    parse_complex,
    parse_map,
)
from .dynamics import (
    DEFAULT_SEEDS,
    Classification,
    ClassifyOptions,
    DynamicsError,
    MultiplierEstimate,
    NontangentialDiagnostic,
    OrbitRecord,
    StepEstimate,
    WolffEstimate,
    classify,
    conjugate_to_halfplane,
    estimate_multiplier,
    estimate_wolff,
    nontangential_diagnostic,
    orbit,
    richardson_limit,
    step_estimate,
    two_point_contraction,
)
from .straightening import (
    EquivalenceFit,
    StraighteningLimit,
    StraighteningRecord,
    default_grid,
    evaluate_limit_at,
    step_via_straightening,
    straightened_iterate,
    straightening_equivalence,
    straightening_limit,
)
from .valiron import (
    ArgDichotomyVerdict,
    NotParabolicError,
    NotPositiveStepError,
    RatioReport,
    SlopeAgreement,
    SlopeReport,
    arg_dichotomy_check,
    ratio_sequence,
    slope_propagation_check,
    slope_sequence,
)
from .catalog import CATALOG, CatalogEntry, get as catalog_get, names as catalog_names
