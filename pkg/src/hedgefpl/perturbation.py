"""Noise families for perturbed-leader algorithms and their pairwise selection laws.

For two experts whose cumulative losses differ by c >= 0, the probability
that the trailing expert wins a perturbed comparison is

    integral over v of  f(v) * (1 - F(v + c))  dv

for i.i.d. noise with density f and CDF F. Closed forms exist for the three
shipped continuous families; ``pair_probability_quadrature`` evaluates the
integral numerically and serves as the independent oracle for them.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import RngLike, as_generator
from .errors import ConfigurationError, NumericError


class Family(str, enum.Enum):
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    GUMBEL = "gumbel"
    POINT_MASS_ZERO = "point-mass-zero"


class Sign(str, enum.Enum):
    SUBTRACT = "subtract"
    ADD = "add"


@dataclass(frozen=True)
class PerturbationSpec:
    """Noise distribution plus the sign convention for applying it.

    scale means: uniform upper bound (support [0, scale]); exponential rate
    (density scale*e^(-scale*x), mean 1/scale); Gumbel scale. location is the
    Gumbel offset, ignored elsewhere. sign says whether the noise is
    subtracted from or added to cumulative costs before the argmin.
    """

    family: Family
    scale: float = 1.0
    location: float = 0.0
    sign: Sign = Sign.SUBTRACT

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "sign", Sign(self.sign))
        if self.family is not Family.POINT_MASS_ZERO:
            if not (self.scale > 0 and math.isfinite(self.scale)):
                raise ConfigurationError(f"scale must be positive and finite, got {self.scale}")

    @classmethod
    def uniform(cls, scale: float, sign: Sign = Sign.SUBTRACT) -> "PerturbationSpec":
        return cls(Family.UNIFORM, scale=scale, sign=sign)

    @classmethod
    def exponential(cls, rate: float, sign: Sign = Sign.SUBTRACT) -> "PerturbationSpec":
        return cls(Family.EXPONENTIAL, scale=rate, sign=sign)

    @classmethod
    def gumbel(cls, scale: float, location: float = 0.0, sign: Sign = Sign.SUBTRACT) -> "PerturbationSpec":
        return cls(Family.GUMBEL, scale=scale, location=location, sign=sign)

    @classmethod
    def point_mass_zero(cls, sign: Sign = Sign.SUBTRACT) -> "PerturbationSpec":
        return cls(Family.POINT_MASS_ZERO, sign=sign)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "scale": self.scale,
            "location": self.location,
            "sign": self.sign.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbationSpec":
        return cls(
            family=Family(d["family"]),
            scale=float(d.get("scale", 1.0)),
            location=float(d.get("location", 0.0)),
            sign=Sign(d.get("sign", "subtract")),
        )


def _open_unit(gen: np.random.Generator, size) -> np.ndarray:
    # Uniform on the open interval (0,1): safe input for -log and log(-log).
    return gen.integers(1, 1 << 53, size=size) / float(1 << 53)


def sample_array(spec: PerturbationSpec, size, rng: RngLike) -> np.ndarray:
    """Draw an array of the given shape from the noise family (inverse CDF)."""
    gen = as_generator(rng)
    if spec.family is Family.POINT_MASS_ZERO:
        return np.zeros(size)
    if spec.family is Family.UNIFORM:
        return gen.random(size) * spec.scale
    if spec.family is Family.EXPONENTIAL:
        return -np.log(_open_unit(gen, size)) / spec.scale
    # Gumbel(location, scale) via mu - beta*log(-log U)
    return spec.location - spec.scale * np.log(-np.log(_open_unit(gen, size)))


def sample(spec: PerturbationSpec, rng: RngLike) -> float:
    """One draw from the noise family."""
    return float(sample_array(spec, (), rng))


def _pdf(spec: PerturbationSpec, v: float) -> float:
    if spec.family is Family.UNIFORM:
        return 1.0 / spec.scale if 0.0 <= v <= spec.scale else 0.0
    if spec.family is Family.EXPONENTIAL:
        return spec.scale * math.exp(-spec.scale * v) if v >= 0.0 else 0.0
    if spec.family is Family.GUMBEL:
        z = (v - spec.location) / spec.scale
        return math.exp(-z - math.exp(-z)) / spec.scale
    raise ConfigurationError(f"no density for family {spec.family.value}")


def _cdf(spec: PerturbationSpec, v: float) -> float:
    if spec.family is Family.UNIFORM:
        return min(max(v / spec.scale, 0.0), 1.0)
    if spec.family is Family.EXPONENTIAL:
        return 1.0 - math.exp(-spec.scale * v) if v >= 0.0 else 0.0
    if spec.family is Family.GUMBEL:
        return math.exp(-math.exp(-(v - spec.location) / spec.scale))
    raise ConfigurationError(f"no CDF for family {spec.family.value}")


def pair_probability_closed_form(spec: PerturbationSpec, c: float) -> float:
    """Probability that the expert trailing by c wins a two-expert perturbed round.

    Exponential(rate e): 0.5*exp(-e*c). Uniform on [0, e]: (e-c)^2/(2e^2),
    zero for c >= e. Gumbel(scale b): exp(-c/b)/(1+exp(-c/b)), the logistic
    tail, independent of the location parameter.
    """
    if c < 0:
        raise ValueError("c must be >= 0 (normalize the loss gap first)")
    if spec.family is Family.EXPONENTIAL:
        return 0.5 * math.exp(-spec.scale * c)
    if spec.family is Family.UNIFORM:
        e = spec.scale
        if c >= e:
            return 0.0
        return (e - c) ** 2 / (2.0 * e * e)
    if spec.family is Family.GUMBEL:
        w = math.exp(-c / spec.scale)
        return w / (1.0 + w)
    raise ConfigurationError(f"no pairwise closed form for family {spec.family.value}")


def pair_probability_quadrature(spec: PerturbationSpec, c: float, tol: float = 1e-9) -> float:
    """Numerically integrate f(v)*(1-F(v+c)) over the noise support.

    Independent oracle for the closed forms. Compact supports are integrated
    directly; unbounded supports are truncated where the discarded tail mass
    is below tol/10, then integrated adaptively to epsabs tol/2. Point-mass
    noise is handled as an exact sum over its atoms.
    """
    if c < 0:
        raise ValueError("c must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if spec.family is Family.POINT_MASS_ZERO:
        # Single atom at zero: the trailing expert wins only a c=0 comparison.
        return 1.0 if c <= 0.0 else 0.0

    if spec.family is Family.UNIFORM:
        lo, hi = 0.0, max(spec.scale - c, 0.0)
        if hi <= lo:
            return 0.0
    elif spec.family is Family.EXPONENTIAL:
        lo, hi = 0.0, -math.log(tol / 10.0) / spec.scale
    else:  # Gumbel: truncate each tail to mass tol/20
        lo = spec.location - spec.scale * math.log(-math.log(tol / 20.0))
        hi = spec.location + spec.scale * math.log(20.0 / tol)

    def integrand(v: float) -> float:
        return _pdf(spec, v) * (1.0 - _cdf(spec, v + c))

    with warnings.catch_warnings():
        # The abserr check below is the authoritative accuracy signal.
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr = integrate.quad(integrand, lo, hi, epsabs=tol / 2.0, epsrel=0.0, limit=200)
    if abserr > tol:
        raise NumericError(f"quadrature reached only {abserr:.3e} absolute accuracy (requested {tol:.3e})")
    return float(value)


def gumbel_difference_cdf(x: float, beta: float) -> float:
    """CDF of the difference of two i.i.d. Gumbel(mu, beta) draws: logistic(0, beta)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    # 1/(1+exp(-x/beta)), written to avoid overflow for large negative x
    z = x / beta
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    w = math.exp(z)
    return w / (1.0 + w)
