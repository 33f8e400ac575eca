"""cocharlab: exact computation with cocharacter-closed orbits.

Rational limits along one-parameter subgroups, the square-free criterion for
conjugation orbits of endomorphisms, orbit accessibility graphs over finite
fields, matrix tuples as modules, and the G2 root-group calculator.
"""

from .errors import CocharLabError
from .fields import (
    FieldDescriptor,
    FieldElement,
    embed,
    is_nth_power,
    make_extension,
    parse_descriptor,
    parse_element,
    pth_root,
)
from .limits import (
    ActionModel,
    Cocharacter,
    ConjugationModel,
    LimitResult,
    LinearModel,
    WeightGrading,
    grade_vector,
    iterated_limit_check,
    limit,
    p_lambda_membership,
    torus_to_cocharacter,
)
from .linalg import Matrix
from .poly import (
    FactorReport,
    Polynomial,
    factor,
    gcd,
    is_separable,
    radical,
    squarefree_test,
)

__version__ = "0.1.0"

__all__ = [
    "ActionModel", "Cocharacter", "CocharLabError", "ConjugationModel",
    "FactorReport", "FieldDescriptor", "FieldElement", "LimitResult",
    "LinearModel", "Matrix", "Polynomial", "WeightGrading", "embed",
    "factor", "gcd", "grade_vector", "is_nth_power", "is_separable",
    "iterated_limit_check", "limit", "make_extension",
    "p_lambda_membership", "parse_descriptor", "parse_element", "pth_root",
    "radical", "squarefree_test", "torus_to_cocharacter",
]
