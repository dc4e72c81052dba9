from .flatten import CustomGate, FlattenError, flatten
from .lowering import BOOJUM, PLONK, PROFILES, Profile, get_profile, to_profile
from .passes import (
    BooleanFactError,
    boolean_closure,
    boolean_reduce,
    cse,
    dce,
    dedup_assertions,
    drop_bool_checks,
    linear_inline,
)
from .pipeline import (
    DEFAULT_PASSES,
    MUTANT_PASSES,
    PASSES,
    OptimizerError,
    PassReport,
    check_discipline,
    discipline_violations,
    get_pass,
    optimize,
    run_pass,
)
from .poly import Poly

__all__ = [
    "BOOJUM",
    "DEFAULT_PASSES",
    "MUTANT_PASSES",
    "PASSES",
    "PLONK",
    "PROFILES",
    "BooleanFactError",
    "CustomGate",
    "FlattenError",
    "OptimizerError",
    "PassReport",
    "Poly",
    "Profile",
    "boolean_closure",
    "boolean_reduce",
    "check_discipline",
    "cse",
    "dce",
    "dedup_assertions",
    "discipline_violations",
    "drop_bool_checks",
    "flatten",
    "get_pass",
    "get_profile",
    "linear_inline",
    "optimize",
    "run_pass",
    "to_profile",
]
