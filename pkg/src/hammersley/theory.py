"""Closed-form limits: shape functions, characteristic directions, the minimizing boundary
parameter, and the right-hand side of the variance identity."""
from __future__ import annotations

import math
from fractions import Fraction

from .env import ParameterError, west_parameter


def _check_p(p):
    if not (0 < p < 1):
        raise ParameterError(f"p must lie in (0,1), got {p}")


def _check_u(u):
    if not (0 < u <= 1):
        raise ParameterError(f"u must lie in (0,1], got {u}")


def shape_pp(p: float, s: float, t: float) -> float:
    """Limit of G/N toward (Ns, Nt) in the model without boundary weights."""
    _check_p(p)
    if s < 0 or t < 0:
        raise ParameterError("direction coordinates must be nonnegative")
    # flat branches first; the comparisons are exact on the multiplied-out form
    if t * p >= s:
        return float(s)
    if t <= p * s:
        return float(t)
    return (2.0 * math.sqrt(p * s * t) - p * (t + s)) / (1.0 - p)


def shape_boundary(p: float, u: float, s: float, t: float) -> float:
    _check_p(p)
    _check_u(u)
    return s * u + t * west_parameter(p, u)


def minimizer_u(p: float, x: float) -> float:
    """Boundary parameter u at which shape_boundary(p, u, x, 1) attains shape_pp(p, x, 1)."""
    _check_p(p)
    if not (0 < x <= 1):
        raise ParameterError(f"x must lie in (0,1], got {x}")
    if x <= p:
        return 1.0
    return (math.sqrt(p / x) - p) / (1.0 - p)


def characteristic_ratio(p: float, u: float) -> float:
    """n/m of the characteristic direction for boundary parameter u."""
    return (p + (1.0 - p) * u) ** 2 / p


def characteristic_endpoint(p, u, N: int) -> tuple[int, int]:
    """(N, floor(N (p + (1-p) u)^2 / p)), evaluated exactly on the decimal inputs."""
    _check_p(p)
    _check_u(u)
    if N < 1:
        raise ParameterError("N must be positive")
    P, U = Fraction(str(p)), Fraction(str(u))
    return int(N), math.floor(N * (P + (1 - P) * U) ** 2 / P)


def variance_identity_rhs(p: float, u: float, m: int, n: int, A: float) -> float:
    """n l(1-l) - m u(1-u) + 2 u(1-u) A, with l the west parameter."""
    _check_p(p)
    _check_u(u)
    return n * p * u * (1 - u) / (u + p * (1 - u)) ** 2 - m * u * (1 - u) + 2 * u * (1 - u) * A


def variance_identity_rhs_east(p: float, u: float, m: int, n: int, A_east: float) -> float:
    """Same variance written through the east-side coefficient: m u(1-u) - n l(1-l) - 2u(1-u) A_E."""
    _check_p(p)
    _check_u(u)
    return m * u * (1 - u) - n * p * u * (1 - u) / (u + p * (1 - u)) ** 2 - 2 * u * (1 - u) * A_east
