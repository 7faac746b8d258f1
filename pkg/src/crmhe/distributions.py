"""Parametric lifetime families.

Every family exposes the analytic ingredients the entropy code needs: survival
(also on the log scale), density, hazard, mean residual life, quantiles,
inverse-transform sampling and the mean.  The one non-standard method is
:meth:`Lifetime.residual_integral`, the closed form of

    R(t; p) = integral_t^inf (S(x) / S(t))**p dx,

which gives the mean residual life at ``p = 1`` and the dynamic entropy
integral at ``p = 2 - alpha``.  Integration always starts at ``t`` even when
``t`` lies left of the support, where the survival is identically one.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy import special

from .errors import DivergentEntropy, DomainError, InvalidParameterError

__all__ = [
    "Lifetime",
    "Uniform",
    "Exponential",
    "ParetoI",
    "ParetoII",
    "GPD",
    "Weibull",
    "ProportionalHazards",
    "FAMILIES",
    "make_distribution",
]

# e**z * Q(s, z) loses all precision past this point; callers fall back to quadrature.
_WEIBULL_GAMMA_LIMIT = 50.0


def _as_float_array(x):
    return np.asarray(x, dtype=float)


def _scalarize(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


class Lifetime(ABC):
    """Base class for a non-negative lifetime distribution."""

    family: ClassVar[str] = ""

    # -- support ---------------------------------------------------------
    @property
    def lower(self) -> float:
        """Left end of the support."""
        return 0.0

    @property
    def upper(self) -> float:
        """Right end of the support (``inf`` if unbounded)."""
        return math.inf

    @property
    @abstractmethod
    def params(self) -> tuple[float, ...]:
        """Parameters in the positional order used on the command line."""

    # -- primitives each family implements --------------------------------
    @abstractmethod
    def _log_survival(self, x: np.ndarray) -> np.ndarray:
        """log S(x) for x inside the closed support."""

    @abstractmethod
    def _density(self, x: np.ndarray) -> np.ndarray:
        """Density for x inside the support."""

    @abstractmethod
    def _hazard(self, x: np.ndarray) -> np.ndarray:
        """Hazard for x inside the support (analytic, no division by S)."""

    @abstractmethod
    def isf_log(self, log_s):
        """Point x where ``log S(x) == log_s`` (``log_s <= 0``)."""

    @abstractmethod
    def mean(self) -> float:
        """Mean lifetime; raises :class:`DomainError` when infinite."""

    def _residual_closed(self, t: float, power: float) -> float | None:
        """Closed form of R(t; power) for ``lower <= t < upper``, or None."""
        return None

    def integrability(self, power: float) -> tuple[float, str] | None:
        """Margin that must be positive for R(t; power) to be finite.

        Returns ``(margin, expression)`` or None when the integral is finite
        for every positive power.
        """
        return None

    # -- public API --------------------------------------------------------
    def log_survival(self, x):
        xa = _as_float_array(x)
        out = np.zeros_like(xa)
        inside = (xa >= self.lower) & (xa < self.upper)
        out[xa >= self.upper] = -np.inf
        if np.any(inside):
            out[inside] = self._log_survival(xa[inside])
        return _scalarize(out, x)

    def survival(self, x):
        """S(x) = P(X > x); 1 left of the support, 0 right of it."""
        return _scalarize(np.exp(_as_float_array(self.log_survival(x))), x)

    def cdf(self, x):
        return _scalarize(-np.expm1(_as_float_array(self.log_survival(x))), x)

    def density(self, x):
        xa = _as_float_array(x)
        out = np.zeros_like(xa)
        inside = (xa >= self.lower) & (xa < self.upper)
        if np.any(inside):
            out[inside] = self._density(xa[inside])
        return _scalarize(out, x)

    def hazard(self, t):
        """h(t) = f(t) / S(t); undefined where S(t) = 0."""
        ta = _as_float_array(t)
        if np.any(ta >= self.upper):
            raise DomainError(f"hazard undefined where survival is zero (t >= {self.upper})")
        out = np.zeros_like(ta)
        inside = ta >= self.lower
        if np.any(inside):
            out[inside] = self._hazard(ta[inside])
        return _scalarize(out, t)

    def quantile(self, p):
        """inf{x : F(x) >= p} for p in (0, 1)."""
        pa = _as_float_array(p)
        if np.any(~((pa > 0.0) & (pa < 1.0))):
            raise DomainError("quantile requires 0 < p < 1")
        return _scalarize(_as_float_array(self.isf_log(np.log1p(-pa))), p)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` i.i.d. lifetimes by inverse transform."""
        if int(n) != n or n < 1:
            raise InvalidParameterError(f"sample size must be a positive integer, got {n}")
        u = rng.random(int(n))
        # u in [0, 1): log1p(-u) is finite and u = 0 maps to the support's left end.
        return np.asarray(self.isf_log(np.log1p(-u)), dtype=float)

    def check_integrable(self, power: float) -> None:
        cond = self.integrability(power)
        if cond is not None and not cond[0] > 0.0:
            margin, expr = cond
            raise DivergentEntropy(
                f"survival integral diverges for {self}: {expr} = {margin:.6g} must be > 0 "
                f"(p = {power:.6g})"
            )

    def residual_integral(self, t: float, power: float) -> float | None:
        """Closed form of integral_t^inf (S(x)/S(t))**power dx, or None if unavailable."""
        if not self.log_survival(t) > -math.inf:
            raise DomainError(f"survival at t={t} is zero for {self}")
        self.check_integrable(power)
        start = max(t, self.lower)
        inner = self._residual_closed(start, power)
        if inner is None:
            return None
        return (start - t) + inner

    def mean_residual_life(self, t: float) -> float:
        """m(t) = E[X - t | X > t]."""
        if not self.log_survival(t) > -math.inf:
            raise DomainError(f"mean residual life undefined where survival is zero (t={t})")
        cond = self.integrability(1.0)
        if cond is not None and not cond[0] > 0.0:
            raise DomainError(f"infinite mean for {self}: {cond[1]} = {cond[0]:.6g} must be > 0")
        value = self.residual_integral(t, 1.0)
        if value is None:
            from .quadrature import residual_integral

            value, _ = residual_integral(self, t, 1.0)
        return value

    def __str__(self) -> str:
        args = ", ".join(f"{p:g}" for p in self.params)
        return f"{type(self).__name__}({args})"


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise InvalidParameterError(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True)
class Uniform(Lifetime):
    """Uniform on ``(low, high)`` with ``0 <= low < high``."""

    low: float
    high: float
    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        lo, hi = float(self.low), float(self.high)
        if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 <= lo < hi):
            raise InvalidParameterError(f"uniform requires 0 <= low < high, got ({lo}, {hi})")

    @property
    def lower(self):
        return float(self.low)

    @property
    def upper(self):
        return float(self.high)

    @property
    def params(self):
        return (float(self.low), float(self.high))

    def _log_survival(self, x):
        return np.log((self.high - x) / (self.high - self.low))

    def _density(self, x):
        return np.full_like(x, 1.0 / (self.high - self.low))

    def _hazard(self, x):
        return 1.0 / (self.high - x)

    def isf_log(self, log_s):
        return self.high - (self.high - self.low) * np.exp(log_s)

    def mean(self):
        return 0.5 * (self.low + self.high)

    def _residual_closed(self, t, power):
        return (self.high - t) / (power + 1.0)


@dataclass(frozen=True)
class Exponential(Lifetime):
    """Exponential with rate ``rate``."""

    rate: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        _positive("rate", self.rate)

    @property
    def params(self):
        return (float(self.rate),)

    def _log_survival(self, x):
        return -self.rate * x

    def _density(self, x):
        return self.rate * np.exp(-self.rate * x)

    def _hazard(self, x):
        return np.full_like(x, float(self.rate))

    def isf_log(self, log_s):
        return -np.asarray(log_s, dtype=float) / self.rate + 0.0

    def mean(self):
        return 1.0 / self.rate

    def _residual_closed(self, t, power):
        return 1.0 / (self.rate * power)


@dataclass(frozen=True)
class ParetoI(Lifetime):
    """Pareto type I: S(x) = (scale / x)**shape for x >= scale."""

    scale: float
    shape: float
    family: ClassVar[str] = "pareto1"

    def __post_init__(self):
        _positive("scale", self.scale)
        _positive("shape", self.shape)

    @property
    def lower(self):
        return float(self.scale)

    @property
    def params(self):
        return (float(self.scale), float(self.shape))

    def _log_survival(self, x):
        return self.shape * np.log(self.scale / x)

    def _density(self, x):
        return self.shape / x * (self.scale / x) ** self.shape

    def _hazard(self, x):
        return self.shape / x

    def isf_log(self, log_s):
        return self.scale * np.exp(-np.asarray(log_s, dtype=float) / self.shape)

    def mean(self):
        if self.shape <= 1.0:
            raise DomainError(f"infinite mean for {self}: shape must exceed 1")
        return self.shape * self.scale / (self.shape - 1.0)

    def integrability(self, power):
        return (self.shape * power - 1.0, "shape*p - 1")

    def _residual_closed(self, t, power):
        return t / (self.shape * power - 1.0)


@dataclass(frozen=True)
class ParetoII(Lifetime):
    """Pareto type II (Lomax): S(x) = (1 + x/scale)**(-shape)."""

    scale: float
    shape: float
    family: ClassVar[str] = "pareto2"

    def __post_init__(self):
        _positive("scale", self.scale)
        _positive("shape", self.shape)

    @property
    def params(self):
        return (float(self.scale), float(self.shape))

    def _log_survival(self, x):
        return -self.shape * np.log1p(x / self.scale)

    def _density(self, x):
        return self.shape / self.scale * (1.0 + x / self.scale) ** (-self.shape - 1.0)

    def _hazard(self, x):
        return self.shape / (self.scale + x)

    def isf_log(self, log_s):
        return self.scale * np.expm1(-np.asarray(log_s, dtype=float) / self.shape)

    def mean(self):
        if self.shape <= 1.0:
            raise DomainError(f"infinite mean for {self}: shape must exceed 1")
        return self.scale / (self.shape - 1.0)

    def integrability(self, power):
        return (self.shape * power - 1.0, "shape*p - 1")

    def _residual_closed(self, t, power):
        return (self.scale + t) / (self.shape * power - 1.0)


@dataclass(frozen=True)
class GPD(Lifetime):
    """Generalized Pareto: S(x) = (1 + shape*x/scale)**(-(1 + 1/shape)).

    ``shape = 0`` is the exponential limit with mean ``scale``; ``-1 < shape < 0``
    gives bounded support ``[0, -scale/shape]``.  In this parametrization the
    mean residual life is ``scale + shape*t`` and the hazard is
    ``(shape + 1) / (scale + shape*t)``.
    """

    shape: float
    scale: float
    family: ClassVar[str] = "gpd"

    def __post_init__(self):
        a = float(self.shape)
        if not (math.isfinite(a) and a > -1.0):
            raise InvalidParameterError(f"gpd shape must exceed -1, got {a}")
        _positive("scale", self.scale)

    @property
    def upper(self):
        return -self.scale / self.shape if self.shape < 0 else math.inf

    @property
    def params(self):
        return (float(self.shape), float(self.scale))

    def _log_survival(self, x):
        a, b = self.shape, self.scale
        if a == 0.0:
            return -x / b
        return -(1.0 + 1.0 / a) * np.log1p(a * x / b)

    def _density(self, x):
        return self._hazard(x) * np.exp(self._log_survival(x))

    def _hazard(self, x):
        return (self.shape + 1.0) / (self.scale + self.shape * x)

    def isf_log(self, log_s):
        a, b = self.shape, self.scale
        ls = np.asarray(log_s, dtype=float)
        if a == 0.0:
            return -b * ls + 0.0
        return b / a * np.expm1(-ls * a / (a + 1.0))

    def mean(self):
        return float(self.scale)

    def integrability(self, power):
        return ((self.shape + 1.0) * power - self.shape, "(shape+1)*p - shape")

    def _residual_closed(self, t, power):
        a, b = self.shape, self.scale
        return (b + a * t) / ((a + 1.0) * power - a)


@dataclass(frozen=True)
class Weibull(Lifetime):
    """Weibull with S(x) = exp(-(x/scale)**shape)."""

    shape: float
    scale: float
    family: ClassVar[str] = "weibull"

    def __post_init__(self):
        _positive("shape", self.shape)
        _positive("scale", self.scale)

    @property
    def params(self):
        return (float(self.shape), float(self.scale))

    def _log_survival(self, x):
        return -((x / self.scale) ** self.shape)

    def _density(self, x):
        k, lam = self.shape, self.scale
        z = x / lam
        return k / lam * z ** (k - 1.0) * np.exp(-(z**k))

    def _hazard(self, x):
        k, lam = self.shape, self.scale
        return k / lam * (x / lam) ** (k - 1.0)

    def isf_log(self, log_s):
        return self.scale * (-np.asarray(log_s, dtype=float)) ** (1.0 / self.shape)

    def mean(self):
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def _residual_closed(self, t, power):
        # Substituting u = power*(x/scale)**shape gives an upper incomplete gamma.
        k, lam = self.shape, self.scale
        z = power * (t / lam) ** k
        if z > _WEIBULL_GAMMA_LIMIT:
            return None
        s = 1.0 / k
        return lam / k * power ** (-s) * special.gamma(s) * math.exp(z) * special.gammaincc(s, z)


@dataclass(frozen=True)
class ProportionalHazards(Lifetime):
    """Lifetime with survival ``base.survival(x)**theta``.

    With integer ``theta = n`` this is the minimum of n i.i.d. copies of
    ``base`` (a series system).
    """

    base: Lifetime
    theta: float
    family: ClassVar[str] = "ph"

    def __post_init__(self):
        _positive("theta", self.theta)

    @property
    def lower(self):
        return self.base.lower

    @property
    def upper(self):
        return self.base.upper

    @property
    def params(self):
        return (*self.base.params, float(self.theta))

    def _log_survival(self, x):
        return self.theta * self.base._log_survival(x)

    def _density(self, x):
        return self._hazard(x) * np.exp(self._log_survival(x))

    def _hazard(self, x):
        return self.theta * self.base._hazard(x)

    def isf_log(self, log_s):
        return self.base.isf_log(np.asarray(log_s, dtype=float) / self.theta)

    def mean(self):
        from .quadrature import residual_integral

        self.check_integrable(1.0)
        value, _ = residual_integral(self, 0.0, 1.0)
        return value

    def integrability(self, power):
        cond = self.base.integrability(self.theta * power)
        if cond is None:
            return None
        return (cond[0], cond[1].replace("p", "theta*p"))

    def _residual_closed(self, t, power):
        return None

    def __str__(self):
        return f"PH({self.base}, theta={self.theta:g})"


FAMILIES: dict[str, type[Lifetime]] = {
    "uniform": Uniform,
    "unif": Uniform,
    "exp": Exponential,
    "exponential": Exponential,
    "pareto1": ParetoI,
    "paretoi": ParetoI,
    "pareto": ParetoI,
    "pareto2": ParetoII,
    "paretoii": ParetoII,
    "lomax": ParetoII,
    "gpd": GPD,
    "weibull": Weibull,
}

_ARITY = {Uniform: 2, Exponential: 1, ParetoI: 2, ParetoII: 2, GPD: 2, Weibull: 2}


def make_distribution(family: str, params) -> Lifetime:
    """Build a distribution from a family name and positional parameters.

    ``params`` may be a sequence of numbers or a comma-separated string.
    Orders: uniform ``low,high``; exp ``rate``; pareto1 ``scale,shape``;
    pareto2 ``scale,shape``; gpd ``shape,scale``; weibull ``shape,scale``.
    """
    try:
        cls = FAMILIES[family.strip().lower()]
    except KeyError:
        known = ", ".join(sorted({c.family for c in FAMILIES.values()}))
        raise InvalidParameterError(f"unknown family {family!r}; expected one of {known}") from None
    if isinstance(params, str):
        try:
            values = [float(p) for p in params.replace(" ", "").split(",") if p]
        except ValueError:
            raise InvalidParameterError(f"could not parse parameters {params!r}") from None
    else:
        values = [float(p) for p in params]
    if len(values) != _ARITY[cls]:
        raise InvalidParameterError(
            f"{cls.family} takes {_ARITY[cls]} parameter(s), got {len(values)}"
        )
    return cls(*values)
