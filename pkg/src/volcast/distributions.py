"""Standardized residual distributions for volatility models.

Every member has mean 0 and variance 1 so that the conditional variance
carries all the scale. Three families: normal, Student-t (unit-variance
scaling, so nu > 2), and a Hansen-style skewed t whose skew parameter xi
lies in (-1, 1) with xi = 0 reducing exactly to the symmetric t.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats
from scipy.special import gammaln

from .errors import ValidationError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class DistKind(enum.Enum):
    NORMAL = "normal"
    STUDENT_T = "t"
    SKEW_T = "skewt"


@dataclass(frozen=True)
class ResidualDistribution:
    """Base for the standardized residual families."""

    def log_density(self, z):
        raise NotImplementedError

    def abs_moment(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, z):
        raise NotImplementedError

    def prob_negative(self) -> float:
        """P(Z < 0) under the distribution."""
        return float(self.cdf(0.0))

    @property
    def kind(self) -> DistKind:
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(ResidualDistribution):
    def log_density(self, z):
        z = np.asarray(z, dtype=np.float64)
        return -0.5 * (math.log(2.0 * math.pi) + z * z)

    def abs_moment(self) -> float:
        return SQRT_2_OVER_PI

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_normal(n)

    def cdf(self, z):
        return stats.norm.cdf(z)

    def prob_negative(self) -> float:
        return 0.5

    @property
    def kind(self) -> DistKind:
        return DistKind.NORMAL


@dataclass(frozen=True)
class StudentT(ResidualDistribution):
    """Student-t rescaled to unit variance; requires nu > 2."""

    nu: float

    def __post_init__(self):
        if not (self.nu > 2.0 and math.isfinite(self.nu)):
            raise ValidationError(f"StudentT needs nu > 2, got {self.nu}")

    def log_density(self, z):
        z = np.asarray(z, dtype=np.float64)
        nu = self.nu
        const = (
            gammaln((nu + 1.0) / 2.0)
            - gammaln(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
        )
        return const - ((nu + 1.0) / 2.0) * np.log1p(z * z / (nu - 2.0))

    def abs_moment(self) -> float:
        nu = self.nu
        log_val = (
            math.log(2.0)
            + 0.5 * math.log(nu - 2.0)
            + gammaln((nu + 1.0) / 2.0)
            - 0.5 * math.log(math.pi)
            - math.log(nu - 1.0)
            - gammaln(nu / 2.0)
        )
        return math.exp(log_val)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_t(self.nu, size=n) * math.sqrt((self.nu - 2.0) / self.nu)

    def cdf(self, z):
        scale = math.sqrt(self.nu / (self.nu - 2.0))
        return stats.t.cdf(np.asarray(z, dtype=np.float64) * scale, self.nu)

    def prob_negative(self) -> float:
        return 0.5

    @property
    def kind(self) -> DistKind:
        return DistKind.STUDENT_T


@dataclass(frozen=True)
class SkewT(ResidualDistribution):
    """Hansen's skewed t, standardized to mean 0 and variance 1.

    xi in (-1, 1) controls asymmetry: negative xi puts more mass on the
    left tail. xi = 0 recovers StudentT(nu) exactly. The density is a
    piecewise t whose two halves are glued continuously at z = -a/b with

        c = Gamma((nu+1)/2) / (sqrt(pi (nu-2)) Gamma(nu/2))
        a = 4 xi c (nu - 2) / (nu - 1)
        b^2 = 1 + 3 xi^2 - a^2
    """

    nu: float
    xi: float

    def __post_init__(self):
        if not (self.nu > 2.0 and math.isfinite(self.nu)):
            raise ValidationError(f"SkewT needs nu > 2, got {self.nu}")
        if not (abs(self.xi) < 1.0):
            raise ValidationError(f"SkewT needs xi in (-1, 1), got {self.xi}")

    def _consts(self) -> tuple[float, float, float]:
        nu, xi = self.nu, self.xi
        log_c = (
            gammaln((nu + 1.0) / 2.0)
            - gammaln(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
        )
        c = math.exp(log_c)
        a = 4.0 * xi * c * (nu - 2.0) / (nu - 1.0)
        b = math.sqrt(1.0 + 3.0 * xi * xi - a * a)
        return a, b, c

    def log_density(self, z):
        z = np.asarray(z, dtype=np.float64)
        nu, xi = self.nu, self.xi
        a, b, c = self._consts()
        # branch by side of the join point -a/b, expressed via sign of bz+a
        shifted = b * z + a
        denom = np.where(shifted < 0.0, 1.0 - xi, 1.0 + xi)
        core = np.log1p((shifted / denom) ** 2 / (nu - 2.0))
        return math.log(b) + math.log(c) - ((nu + 1.0) / 2.0) * core

    def abs_moment(self) -> float:
        a, b, _ = self._consts()
        join = -a / b
        points = sorted({join, 0.0})

        def integrand(z):
            return abs(z) * math.exp(float(self.log_density(z)))

        total = 0.0
        edges = [-np.inf, *points, np.inf]
        for lo, hi in zip(edges, edges[1:]):
            val, _err = integrate.quad(integrand, lo, hi, limit=200)
            total += val
        return total

    def cdf(self, z):
        z = np.asarray(z, dtype=np.float64)
        nu, xi = self.nu, self.xi
        a, b, _ = self._consts()
        scale = math.sqrt(nu / (nu - 2.0))
        shifted = b * z + a
        left = shifted < 0.0
        y_left = shifted / (1.0 - xi) * scale
        y_right = shifted / (1.0 + xi) * scale
        out = np.where(
            left,
            (1.0 - xi) * stats.t.cdf(y_left, nu),
            (1.0 - xi) / 2.0 + (1.0 + xi) * (stats.t.cdf(y_right, nu) - 0.5),
        )
        return out if out.ndim else float(out)

    def ppf(self, u):
        u = np.asarray(u, dtype=np.float64)
        nu, xi = self.nu, self.xi
        a, b, _ = self._consts()
        threshold = (1.0 - xi) / 2.0
        lower = u < threshold
        q = np.where(
            lower,
            stats.t.ppf(np.clip(u / (1.0 - xi), 0.0, 1.0), nu),
            stats.t.ppf(np.clip(0.5 + (u - threshold) / (1.0 + xi), 0.0, 1.0), nu),
        )
        sign = np.where(lower, -1.0, 1.0)
        z = (q * (1.0 + sign * xi) * math.sqrt(1.0 - 2.0 / nu) - a) / b
        return z if z.ndim else float(z)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.asarray(self.ppf(rng.random(n)), dtype=np.float64)

    @property
    def kind(self) -> DistKind:
        return DistKind.SKEW_T


def make_distribution(kind: DistKind, nu: float | None = None, xi: float | None = None) -> ResidualDistribution:
    """Build a distribution from its kind tag and optional shape parameters."""
    if kind is DistKind.NORMAL:
        return Normal()
    if kind is DistKind.STUDENT_T:
        if nu is None:
            raise ValidationError("Student-t needs nu")
        return StudentT(nu=nu)
    if kind is DistKind.SKEW_T:
        if nu is None or xi is None:
            raise ValidationError("skew-t needs nu and xi")
        return SkewT(nu=nu, xi=xi)
    raise ValidationError(f"unknown distribution kind {kind!r}")


def log_density(dist: ResidualDistribution, z):
    return dist.log_density(z)


def abs_moment(dist: ResidualDistribution) -> float:
    return dist.abs_moment()


def sample(dist: ResidualDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    return dist.sample(rng, n)
