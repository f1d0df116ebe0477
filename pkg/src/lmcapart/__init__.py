"""Lower bounds on behavioural distance for labelled Markov chains, certified
by apartness proofs and explained by quantitative modal formulas."""

from types import ModuleType as _ModuleType

__version__ = "0.1.0"

from .errors import (
    InvalidProof,
    LmcApartError,
    MissingValue,
    NotNonexpansive,
    ParseError,
    UnknownGenerator,
    UnknownState,
    ValidationError,
)
from .kantorovich import (
    DistanceTable,
    OptimalStep,
    coupling_value,
    distance,
    distance_matrix,
    distance_until,
    extend_nonexpansive,
    gamma_step,
)
from .logic import (
    FALSE,
    And,
    Atom,
    Formula,
    Minus,
    Next,
    Not,
    Or,
    Plus,
    interp,
    modal_depth,
    parse_formula,
    render_formula,
    simplify,
)
from .model import (
    Distribution,
    FiniteLmc,
    Lmc,
    RandomWalk,
    builtin_lmc,
    expected_value,
    format_rational,
    joint_support,
    load_lmc,
    parse_rational,
)
from .proofs import (
    CheckReport,
    Exp,
    Judgement,
    Lab,
    ProofDag,
    Symm,
    Weak,
    Zero,
    check_proof,
    guard_depth,
    pretty,
    synthesize_proof,
    synthesize_tree,
)
from .translate import formula_to_proof, proof_to_formula

__all__ = [n for n, v in list(globals().items()) if not n.startswith("_") and not isinstance(v, _ModuleType)]
