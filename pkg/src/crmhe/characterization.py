"""Identities, bounds, orderings and characterizations as numeric checks.

Everything here rests on the hazard relation obtained by differentiating the
dynamic entropy in t.  Writing J(t) = (alpha-1) CRM_alpha(X;t) + 1 > 0,

    (alpha - 1) CRM'_alpha(X; t) = (2 - alpha) h(t) J(t) - 1.

Because the left side carries the factor (alpha - 1), the direction of every
hazard-type inequality derived from it flips between 0 < alpha < 1 and
1 < alpha < 2.  The checks below evaluate the regime-correct direction and,
where a textbook statement fixes one direction for both regimes, also report
whether that statement holds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .distributions import GPD, Exponential, Lifetime, ProportionalHazards
from .entropy import EntropyQuery, EntropyValue, check_alpha, crmhe, crmhe_quadrature, dcrmhe
from .errors import DivergentEntropy, DomainError, InvalidParameterError

__all__ = [
    "Monotonicity",
    "affine_transform_value",
    "ph_transform_value",
    "hazard_relation_residual",
    "mean_bound_check",
    "classify_monotonicity",
    "hazard_order_entropy_check",
    "survival_bound",
    "gpd_characterization_residuals",
    "distinguishability_check",
    "cre_limit",
    "exponential_with_entropy",
]


def _entropy_curve(dist, alpha, t_grid, method="auto"):
    return np.array([dcrmhe(dist, alpha, float(t), method=method).value for t in t_grid])


def _check_grid(dist, t_grid):
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("t_grid needs at least two points")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("t_grid must be non-negative and strictly increasing")
    if np.any(np.asarray(dist.survival(grid)) <= 0.0):
        raise DomainError(f"t_grid leaves the support of {dist}")
    return grid


# -- hazard relation -----------------------------------------------------------


def hazard_relation_residual(
    dist: Lifetime, alpha: float, t: float, fd_step: float | None = None, method="auto"
) -> float:
    """Residual of the hazard relation with CRM' from a central difference.

    Zero up to discretization and quadrature noise for any lifetime.
    """
    alpha = check_alpha(alpha)
    d = max(1e-5, 1e-4 * t) if fd_step is None else float(fd_step)
    lo, hi = t - d, t + d
    if lo < 0.0 or lo < dist.lower < hi or hi >= dist.upper or not dist.survival(hi) > 0:
        raise DomainError(f"t={t} is within fd_step={d:g} of the support boundary of {dist}")
    c_plus = dcrmhe(dist, alpha, hi, method=method).value
    c_minus = dcrmhe(dist, alpha, lo, method=method).value
    c_mid = dcrmhe(dist, alpha, t, method=method).value
    lhs = (alpha - 1.0) * (c_plus - c_minus) / (2.0 * d)
    rhs = (2.0 - alpha) * float(dist.hazard(t)) * ((alpha - 1.0) * c_mid + 1.0) - 1.0
    return lhs - rhs


# -- transformations -----------------------------------------------------------


def affine_transform_value(base: EntropyValue | float, a: float, b: float, alpha: float) -> float:
    """Entropy of Y = aX + b from the entropy of X: ``a*base + (a-1)/(alpha-1)``.

    For the dynamic measure pass ``base = CRM(X; (t-b)/a)`` with ``t >= b``;
    the result is CRM(Y; t).  For the static measure the identity is exact
    when ``b = 0``; with ``b > 0`` the result is CRM(Y; b), the entropy
    measured from Y's lower support point, since integration from 0 adds
    ``b / (alpha - 1)`` for the stretch where Y cannot yet have failed.
    """
    alpha = check_alpha(alpha)
    if not a > 0.0:
        raise InvalidParameterError(f"scale a must be positive, got {a}")
    if not b >= 0.0:
        raise InvalidParameterError(f"shift b must be non-negative, got {b}")
    return a * float(base) + (a - 1.0) / (alpha - 1.0)


@dataclass(frozen=True)
class PHCheck:
    alpha: float
    theta: float
    beta: float
    direct: float
    via_relation: float | None
    beta_in_range: bool

    @property
    def discrepancy(self) -> float | None:
        if self.via_relation is None:
            return None
        return abs(self.direct - self.via_relation)


def ph_transform_value(
    dist: Lifetime, alpha: float, theta: float, query: EntropyQuery | None = None
) -> PHCheck:
    """Entropy of the proportional-hazards lifetime with survival S**theta.

    ``direct`` integrates S**theta by quadrature; ``via_relation`` uses
    (beta-1)/(alpha-1) * CRM_beta(X) with beta = 2 - theta(2 - alpha), and is
    None when beta falls outside (0, 2) or equals 1.
    """
    alpha = check_alpha(alpha)
    if not theta > 0.0:
        raise InvalidParameterError(f"theta must be positive, got {theta}")
    beta = 2.0 - theta * (2.0 - alpha)
    direct = crmhe_quadrature(ProportionalHazards(dist, theta), alpha, query=query).value
    in_range = 0.0 < beta < 2.0 and beta != 1.0
    via = None
    if in_range:
        via = (beta - 1.0) / (alpha - 1.0) * crmhe(dist, beta).value
    return PHCheck(alpha, float(theta), beta, direct, via, in_range)


# -- mean bound ----------------------------------------------------------------


@dataclass(frozen=True)
class MeanBoundCheck:
    """CRM_alpha(X) against (mu - 1)/(alpha - 1).

    ``gap = crmhe - bound`` is positive in both regimes, because
    (alpha-1)*gap = integral of S**(2-alpha) - S has the sign of alpha - 1.
    The textbook statement claims the bound from above for 1 < alpha < 2;
    ``stated_direction_holds`` records whether that reading is true here.
    """

    alpha: float
    crmhe: float
    mean: float
    bound: float
    gap: float
    stated_direction_holds: bool


def mean_bound_check(dist: Lifetime, alpha: float) -> MeanBoundCheck:
    alpha = check_alpha(alpha)
    mu = dist.mean()
    value = crmhe(dist, alpha).value
    bound = (mu - 1.0) / (alpha - 1.0)
    gap = value - bound
    stated = gap > 0.0 if alpha < 1.0 else gap < 0.0
    return MeanBoundCheck(alpha, value, mu, bound, gap, bool(stated))


def cre_limit(dist: Lifetime, alpha: float) -> float:
    """CRM_alpha(X) - (mu - 1)/(alpha - 1), which tends to the CRE as alpha -> 1.

    For unit-mean lifetimes the correction vanishes and CRM itself converges.
    """
    return mean_bound_check(dist, alpha).gap


# -- monotone classes ------------------------------------------------------------


class Monotonicity(str, enum.Enum):
    INCREASING = "IDCRMHE"
    DECREASING = "DDCRMHE"
    CONSTANT = "constant"
    MIXED = "mixed"


@dataclass(frozen=True)
class MonotonicityReport:
    label: Monotonicity
    t_grid: np.ndarray
    values: np.ndarray
    hazard_bound_consistent: bool


def classify_monotonicity(
    dist: Lifetime, alpha: float, t_grid, tol: float = 1e-9, method="auto"
) -> MonotonicityReport:
    """Classify t -> CRM_alpha(X; t) on a grid by the sign of its increments.

    Also checks pointwise that the hazard sits on the side of
    1 / ((2-alpha) J(t)) the hazard relation demands for the observed class.
    """
    alpha = check_alpha(alpha)
    grid = _check_grid(dist, t_grid)
    values = _entropy_curve(dist, alpha, grid, method=method)
    steps = np.diff(values)
    scale = tol * max(1.0, float(np.max(np.abs(values))))
    up = bool(np.all(steps >= -scale))
    down = bool(np.all(steps <= scale))
    if up and down:
        label = Monotonicity.CONSTANT
    elif up:
        label = Monotonicity.INCREASING
    elif down:
        label = Monotonicity.DECREASING
    else:
        label = Monotonicity.MIXED

    j = (alpha - 1.0) * values + 1.0
    slope_sign = np.sign(alpha - 1.0) * ((2.0 - alpha) * np.asarray(dist.hazard(grid)) * j - 1.0)
    slack = 1e-7
    if label is Monotonicity.INCREASING:
        consistent = bool(np.all(slope_sign >= -slack))
    elif label is Monotonicity.DECREASING:
        consistent = bool(np.all(slope_sign <= slack))
    elif label is Monotonicity.CONSTANT:
        consistent = bool(np.all(np.abs(slope_sign) <= slack))
    else:
        consistent = True
    return MonotonicityReport(label, grid, values, consistent)


@dataclass(frozen=True)
class SurvivalBound:
    """Survival against exp(-integral_0^t dx / ((2-alpha) J(x))).

    ``relation`` is the regime-correct side (``">="``, ``"<="`` or ``"=="``)
    and ``holds`` whether the survival sits on it.  ``stated_relation`` is the
    side claimed for the class irrespective of alpha (DDCRMHE gives ">=").
    """

    t: float
    survival: float
    bound: float
    label: Monotonicity
    relation: str | None
    holds: bool | None
    stated_relation: str | None
    stated_holds: bool | None


def _compare(lhs, rhs, relation, tol):
    if relation == ">=":
        return lhs >= rhs - tol
    if relation == "<=":
        return lhs <= rhs + tol
    return abs(lhs - rhs) <= tol


def survival_bound(
    dist: Lifetime,
    alpha: float,
    t: float,
    monotonicity: Monotonicity | None = None,
    tol: float = 1e-8,
) -> SurvivalBound:
    alpha = check_alpha(alpha)
    s_t = float(dist.survival(t))
    if not s_t > 0.0:
        raise DomainError(f"survival at t={t} is zero for {dist}")
    if t == 0.0:
        return SurvivalBound(0.0, 1.0, 1.0, monotonicity or Monotonicity.CONSTANT, "==", True, "==", True)
    if monotonicity is None:
        monotonicity = classify_monotonicity(dist, alpha, np.linspace(0.0, t, 41)).label

    def rate(x):
        j = (alpha - 1.0) * dcrmhe(dist, alpha, x).value + 1.0
        return 1.0 / ((2.0 - alpha) * j)

    breaks = [p for p in (dist.lower,) if 0.0 < p < t]
    exponent, _ = integrate.quad(rate, 0.0, t, points=breaks or None, epsabs=1e-13, epsrel=1e-11, limit=200)
    bound = math.exp(-exponent)

    if monotonicity is Monotonicity.MIXED:
        return SurvivalBound(t, s_t, bound, monotonicity, None, None, None, None)
    if monotonicity is Monotonicity.CONSTANT:
        relation = stated = "=="
    else:
        stated = ">=" if monotonicity is Monotonicity.DECREASING else "<="
        flipped = {">=": "<=", "<=": ">="}[stated]
        relation = stated if alpha > 1.0 else flipped
    return SurvivalBound(
        t,
        s_t,
        bound,
        monotonicity,
        relation,
        bool(_compare(s_t, bound, relation, tol)),
        stated,
        bool(_compare(s_t, bound, stated, tol)),
    )


# -- hazard-rate ordering ---------------------------------------------------------


@dataclass(frozen=True)
class HazardOrderCheck:
    applicable: bool
    holds: bool | None
    min_margin: float | None


def hazard_order_entropy_check(
    dist_x: Lifetime, dist_y: Lifetime, alpha: float, t_grid, tol: float = 1e-10
) -> HazardOrderCheck:
    """If h_X <= h_Y on the grid, check CRM_X >= CRM_Y (alpha > 1) or <= (alpha < 1).

    ``min_margin`` is the smallest signed margin in the expected direction.
    """
    alpha = check_alpha(alpha)
    grid = _check_grid(dist_x, t_grid)
    _check_grid(dist_y, grid)
    if np.any(np.asarray(dist_x.hazard(grid)) > np.asarray(dist_y.hazard(grid)) + tol):
        return HazardOrderCheck(False, None, None)
    cx = _entropy_curve(dist_x, alpha, grid)
    cy = _entropy_curve(dist_y, alpha, grid)
    margin = (cx - cy) if alpha > 1.0 else (cy - cx)
    m = float(np.min(margin))
    return HazardOrderCheck(True, bool(m >= -tol), m)


# -- GPD characterizations ----------------------------------------------------------


@dataclass(frozen=True)
class GPDResiduals:
    """Maximum deviations from the three GPD characterizations on a grid.

    ``linearity``: CRM(t) from its least-squares line.  ``hazard``:
    CRM(t) - (k/h(t) - c).  ``mrl``: CRM(t) - (k' m(t) - c).  Here
    c = 1/(alpha-1); k and k' come from the GPD parameters, or are fitted
    by least squares for other families.
    """

    linearity: float
    hazard: float
    mrl: float
    slope: float
    k_hazard: float
    k_mrl: float


def gpd_characterization_residuals(dist: Lifetime, alpha: float, t_grid) -> GPDResiduals:
    alpha = check_alpha(alpha)
    grid = _check_grid(dist, t_grid)
    c = 1.0 / (alpha - 1.0)
    values = _entropy_curve(dist, alpha, grid)
    slope, intercept = np.polyfit(grid, values, 1)
    linearity = float(np.max(np.abs(values - (intercept + slope * grid))))

    inv_h = 1.0 / np.asarray(dist.hazard(grid))
    mrl = np.array([dist.mean_residual_life(float(t)) for t in grid])
    if isinstance(dist, GPD):
        a = dist.shape
        denom = (a + 1.0) * (2.0 - alpha) - a
        if not denom > 0.0:
            raise DivergentEntropy(f"(2-alpha)(shape+1) - shape = {denom:.6g} must be > 0")
        k_h = (a + 1.0) / ((alpha - 1.0) * denom)
        k_m = 1.0 / ((alpha - 1.0) * denom)
    else:
        y = values + c
        k_h = float(np.dot(y, inv_h) / np.dot(inv_h, inv_h))
        k_m = float(np.dot(y, mrl) / np.dot(mrl, mrl))
    res_h = float(np.max(np.abs(values - (k_h * inv_h - c))))
    res_m = float(np.max(np.abs(values - (k_m * mrl - c))))
    return GPDResiduals(linearity, res_h, res_m, float(slope), float(k_h), float(k_m))


# -- distinguishability ---------------------------------------------------------------


@dataclass(frozen=True)
class Distinguishability:
    static_gap: float
    max_dynamic_gap: float
    t_at_max: float


def distinguishability_check(dist_x: Lifetime, dist_y: Lifetime, alpha: float, t_grid) -> Distinguishability:
    """Compare two dynamic entropy curves; equal curves imply equal laws."""
    alpha = check_alpha(alpha)
    grid = _check_grid(dist_x, t_grid)
    _check_grid(dist_y, grid)
    gap = np.abs(_entropy_curve(dist_x, alpha, grid) - _entropy_curve(dist_y, alpha, grid))
    i = int(np.argmax(gap))
    static = abs(crmhe(dist_x, alpha).value - crmhe(dist_y, alpha).value)
    return Distinguishability(static, float(gap[i]), float(grid[i]))


def exponential_with_entropy(value: float, alpha: float) -> Exponential:
    """Exponential lifetime whose static entropy equals ``value``."""
    alpha = check_alpha(alpha)
    integral = (alpha - 1.0) * value + 1.0
    if not integral > 0.0:
        raise InvalidParameterError("no lifetime has this entropy at this alpha")
    return Exponential(1.0 / ((2.0 - alpha) * integral))
