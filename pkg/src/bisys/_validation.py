"""Small argument checks used at module boundaries."""

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, QuantumNumberError


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


def check_non_negative(value, name):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and non-negative, got {value!r}")
    return value


def check_open_unit(value, name="eta"):
    value = float(value)
    if not (0.0 < value < 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {value!r}")
    return value


def check_int(value, name, minimum=0):
    if isinstance(value, bool) or int(value) != value:
        raise QuantumNumberError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise QuantumNumberError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_half_integer(j, name="j"):
    """Return ``j`` as an exact Fraction; it must be one of 1/2, 3/2, ..."""
    try:
        frac = Fraction(j).limit_denominator(2)
    except (TypeError, ValueError) as exc:
        raise QuantumNumberError(f"{name} must be a half-integer, got {j!r}") from exc
    if abs(float(frac) - float(j)) > 1e-12 or frac.denominator != 2 or frac < Fraction(1, 2):
        raise QuantumNumberError(f"{name} must be a half-integer >= 1/2, got {j!r}")
    return frac


def as_vector3(values, name):
    vec = np.asarray(values, dtype=float).reshape(-1)
    if vec.shape != (3,):
        raise DomainError(f"{name} must have exactly three components, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise DomainError(f"{name} has non-finite components")
    return vec
