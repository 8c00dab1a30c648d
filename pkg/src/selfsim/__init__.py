"""Automata groups acting on rooted trees: arithmetic, decision procedures and verification."""

from .catalog import CatalogEntry, load, load_json
from .decision import (
    BisimBudget,
    BudgetExceeded,
    OrderResult,
    are_equal,
    is_identity,
    nontrivial_witness,
    order,
    verify_contraction,
    verify_section_onto,
    verify_torsion_base,
)
from .growth import (
    ActivityProfile,
    GrowthReport,
    activity_direct,
    activity_recursive,
    ball_sizes,
    classify_activity,
)
from .machine import (
    InverseInconsistencyError,
    MachineError,
    MealyMachine,
    StateDef,
    StructuralError,
    Word,
    apply,
    fixes_vertex,
    invert,
    root_perm,
    section,
)
from .perm import Perm
from .schreier import SchreierGraph, build, export
from .words import (
    NormalFormShape,
    a_length,
    enumerate_reduced,
    free_reduce,
    parse_word,
    section_profile,
    shape,
)

__version__ = "0.1.0"
