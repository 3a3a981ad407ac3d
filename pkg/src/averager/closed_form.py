"""Closed-form averaged functions of the jerk family and the case classifier.

For the angular standard form of the unfolded jerk system both averaged
functions have closed forms. The zeros of the second one come in two
families, a w = 0 family and a pair with opposite w, and counting which
families are real yields the orbit count for a given (a2, b2, delta).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

#: absolute tolerance for the degeneracy checks on the classifier quantities
DEGENERACY_TOL = 1e-10


class HypothesisViolated(ValueError):
    """The classifier was called on a degenerate parameter combination."""


class OrbitCount(Enum):
    THREE = "three"
    TWO = "two"
    ONE = "one"
    ZERO = "zero"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class OrbitPrediction:
    """Real roots of the second averaged function with their Jacobian data."""

    roots: list
    jac_dets: list
    count: OrbitCount
    degenerate_reason: Optional[str] = None


def f_closed(r: float, w: float, a1: float, b1: float, delta: float) -> np.ndarray:
    """First averaged function ( r(b1 - a1*delta^2)/(2*delta^3), -b1*w/delta^3 )."""
    return np.array(
        [r * (b1 - a1 * delta ** 2) / (2.0 * delta ** 3), -b1 * w / delta ** 3]
    )


def g_closed(r: float, w: float, a2: float, b2: float, delta: float) -> np.ndarray:
    """Second averaged function for the case a1 = b1 = 0.

    Independent of c1 and c2. The common prefactor 1/(2*delta^5) is part of
    the function; the published Jacobian determinants include it.
    """
    d2 = delta ** 2
    pref = 1.0 / (2.0 * delta ** 5)
    g1 = pref * r * ((3.0 - d2) * r * r + 4.0 * b2 * d2 - 4.0 * a2 * d2 * d2
                     + 12.0 * d2 * w * w) / 4.0
    g2 = -pref * w * ((3.0 - d2) * r * r + 2.0 * b2 * d2 + 2.0 * d2 * w * w)
    return np.array([g1, g2])


def _degeneracies(a2: float, b2: float, delta: float, tol: float):
    """Reasons why the root-family analysis breaks down, empty if none."""
    d2 = delta ** 2
    reasons = []
    if abs(3.0 - d2) <= tol:
        reasons.append("delta^2 = 3 (vanishing cubic coefficient)")
    if abs(2.0 * a2 * d2 - b2) <= tol:
        reasons.append("2*a2*delta^2 = b2 (paired family at w = 0)")
    if abs(a2 * d2 - b2) <= tol:
        reasons.append("a2*delta^2 = b2 (w = 0 family collapses to r = 0)")
    if abs(a2 * d2 + 2.0 * b2) <= tol:
        reasons.append("a2*delta^2 = -2*b2 (paired family collapses to r = 0)")
    return reasons


def _real_families(a2: float, b2: float, delta: float):
    """(family1 present, family2 present, r1sq, r2sq, w2sq)."""
    d2 = delta ** 2
    r1sq = 4.0 * (a2 * d2 - b2) * d2 / (3.0 - d2)
    r2sq = -4.0 * (a2 * d2 + 2.0 * b2) * d2 / (5.0 * (3.0 - d2))
    w2sq = (2.0 * a2 * d2 - b2) / 5.0
    return r1sq > 0.0, r2sq > 0.0 and w2sq > 0.0, r1sq, r2sq, w2sq


def predicted_roots(
    a2: float, b2: float, delta: float, tol: float = DEGENERACY_TOL
) -> OrbitPrediction:
    """Real (r, w) roots of g_closed with their Jacobian determinants.

    The w = 0 family has r^2 = 4(a2*delta^2 - b2)*delta^2/(3 - delta^2); the
    paired family has r^2 = -4(a2*delta^2 + 2*b2)*delta^2/(5(3 - delta^2))
    and w^2 = (2*a2*delta^2 - b2)/5, contributing both signs of w. Only
    families with r^2 > 0 and w^2 > 0 are real; degenerate parameter
    combinations give count DEGENERATE with a reason instead of roots.
    """
    if not (np.isfinite(delta) and delta > 0.0):
        raise ValueError(f"delta must be positive and finite, got {delta}")
    reasons = _degeneracies(a2, b2, delta, tol)
    if reasons:
        return OrbitPrediction(
            roots=[], jac_dets=[], count=OrbitCount.DEGENERATE,
            degenerate_reason="; ".join(reasons),
        )
    d2 = delta ** 2
    has1, has2, r1sq, r2sq, w2sq = _real_families(a2, b2, delta)
    roots = []
    dets = []
    if has1:
        roots.append((float(np.sqrt(r1sq)), 0.0))
        dets.append(-(a2 * d2 - b2) * (2.0 * a2 * d2 - b2) / d2 ** 3)
    if has2:
        r2 = float(np.sqrt(r2sq))
        w2 = float(np.sqrt(w2sq))
        det2 = -2.0 * (a2 * d2 + 2.0 * b2) * (2.0 * a2 * d2 - b2) / (5.0 * d2 ** 3)
        roots.extend([(r2, w2), (r2, -w2)])
        dets.extend([det2, det2])
    count = {0: OrbitCount.ZERO, 1: OrbitCount.ONE,
             2: OrbitCount.TWO, 3: OrbitCount.THREE}[len(roots)]
    return OrbitPrediction(roots=roots, jac_dets=dets, count=count)


def classify(
    a2: float, b2: float, delta: float, tol: float = DEGENERACY_TOL
) -> OrbitCount:
    """Orbit-count case label for an unfolding direction (a2, b2, delta).

    With Qp = (a2*delta^2 + 2*b2)/(3 - delta^2) and
    Qm = (a2*delta^2 - b2)/(3 - delta^2), the w = 0 family is real exactly
    when Qm > 0 and the paired family exactly when Qp < 0 together with
    2*a2*delta^2 > b2. The label is the resulting real-root count, so it
    always matches len(predicted_roots(...).roots) away from the degenerate
    sets. On the collapse boundaries (a2*delta^2 = b2 or = -2*b2) the label
    is DEGENERATE rather than an arbitrary choice of side.

    Raises
    ------
    HypothesisViolated when delta^2 = 3 or 2*a2*delta^2 = b2 (within tol),
    or when delta is not a positive real.
    """
    if not (np.isfinite(delta) and delta > 0.0):
        raise HypothesisViolated(f"delta must be positive and finite, got {delta}")
    d2 = delta ** 2
    if abs(3.0 - d2) <= tol:
        raise HypothesisViolated("delta^2 = 3 violates the case hypotheses")
    if abs(2.0 * a2 * d2 - b2) <= tol:
        raise HypothesisViolated("2*a2*delta^2 = b2 violates the case hypotheses")
    if abs(a2 * d2 - b2) <= tol or abs(a2 * d2 + 2.0 * b2) <= tol:
        return OrbitCount.DEGENERATE
    has1, has2, *_ = _real_families(a2, b2, delta)
    n = (1 if has1 else 0) + (2 if has2 else 0)
    return {0: OrbitCount.ZERO, 1: OrbitCount.ONE,
            2: OrbitCount.TWO, 3: OrbitCount.THREE}[n]
