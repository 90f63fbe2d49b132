"""Single-mode nonclassicality conditions as signed margins.

Each function returns ``lhs - rhs`` of its inequality, so a positive value
flags the state as nonclassical by that condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError
from .fock import State, expectation_moment, quadrature_moments

DEFAULT_TOLERANCE = 1e-9

CRITERIA = ("mandel", "higher_order", "first_order", "squeezing")


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    value: float
    tolerance: float = DEFAULT_TOLERANCE
    order: Optional[int] = None

    @property
    def nonclassical(self) -> bool:
        return self.value > self.tolerance


def mandel_violation(state: State) -> float:
    """|<a^dag a>|^2 - <a^dag^2 a^2>; positive for sub-Poissonian light."""
    return higher_order_violation(state, 2)


def higher_order_violation(state: State, order: int) -> float:
    if order < 2:
        raise DimensionError(f"order must be >= 2, got {order}")
    if order >= state.dim:
        raise DimensionError(f"order {order} needs dim > {order}")
    n = expectation_moment(state, 1, 1)
    return float(abs(n) ** order - expectation_moment(state, order, order).real)


def first_order_violation(state: State) -> float:
    # |<a>|^2 <= <a^dag a> by Cauchy-Schwarz, so this is never positive.
    if state.dim < 2:
        return 0.0
    return float(abs(expectation_moment(state, 0, 1)) ** 2 - expectation_moment(state, 1, 1).real)


def min_quadrature_variance(state: State) -> tuple[float, float]:
    """Smallest quadrature variance and the angle in [0, pi) reaching it.

    With da = a - <a>, Var(x_theta) = 1/2 + <da^dag da> + Re(e^{-2i theta} <da^2>),
    whose minimum over theta is 1/2 + <da^dag da> - |<da^2>|.
    """
    a1, a2, n = quadrature_moments(state)
    c2 = a2 - a1 * a1
    nn = n - abs(a1) ** 2
    var = 0.5 + nn - abs(c2)
    theta = (0.5 * np.angle(c2) + 0.5 * math.pi) % math.pi if abs(c2) > 0 else 0.0
    return float(var), float(theta)


def squeezing_violation(state: State) -> tuple[float, float]:
    var, theta = min_quadrature_variance(state)
    return 0.5 - var, theta


def evaluate_all(state: State, orders=(3,), tolerance: float = DEFAULT_TOLERANCE
                 ) -> list[CriterionReport]:
    """Reports for mandel, each higher order that fits the cutoff, first order and squeezing."""
    reports = [CriterionReport("mandel", mandel_violation(state), tolerance)]
    for ell in orders:
        if ell < state.dim:
            reports.append(
                CriterionReport("higher_order", higher_order_violation(state, ell), tolerance, ell)
            )
    reports.append(CriterionReport("first_order", first_order_violation(state), tolerance))
    reports.append(CriterionReport("squeezing", squeezing_violation(state)[0], tolerance))
    return reports
