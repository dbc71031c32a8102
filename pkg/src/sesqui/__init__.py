"""Exact-arithmetic sesquilinear and hermitian forms over algebras with involution."""

from .algebra import (
    Algebra,
    Mat,
    ValidationReport,
    enumerate_elements,
    enumerate_matrices,
    enumerate_units,
    extension_algebra,
    field_algebra,
    regular_representation,
    validate_algebra,
)
from .budget import Budget
from .errors import (
    BudgetExceededError,
    DimensionMismatch,
    EvenDegreeError,
    InfiniteBaseError,
    NotInvertibleError,
    SesquiError,
)
from .fields import (
    BaseField,
    ExtensionField,
    PrimeField,
    Rationals,
    finite_field,
    quadratic_rationals,
)

__all__ = [
    "Algebra",
    "BaseField",
    "Budget",
    "BudgetExceededError",
    "DimensionMismatch",
    "EvenDegreeError",
    "ExtensionField",
    "InfiniteBaseError",
    "Mat",
    "NotInvertibleError",
    "PrimeField",
    "Rationals",
    "SesquiError",
    "ValidationReport",
    "enumerate_elements",
    "enumerate_matrices",
    "enumerate_units",
    "extension_algebra",
    "field_algebra",
    "finite_field",
    "quadratic_rationals",
    "regular_representation",
    "validate_algebra",
]
