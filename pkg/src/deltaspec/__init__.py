"""Fourier-sparse delta functions on finite abelian groups prod Z_{m_i}."""

from .errors import BudgetExceededError, DeltaError, PreconditionError, VerificationError
from .fields import ComplexField, CyclotomicField, PrimeField, field_for, make_cyclotomic, make_prime_field
from .fourier import DenseFunction, Spectrum, forward, inverse, is_delta_on
from .groups import GroupSpec, PointSet, point_set

__version__ = "0.1.0"
