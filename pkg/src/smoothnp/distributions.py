"""Symmetric location families, the standard normal toolkit, Hermite
polynomials and Student t quantiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .rng import RandomStream
from .sample import Sample

FAMILIES = ("normal", "logistic", "laplace")

_SQRT2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation to the inverse normal CDF (|rel err| < 1.2e-9)
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / _SQRT2PI


def norm_cdf(x):
    return special.ndtr(x)


def _acklam_lower(p: np.ndarray) -> np.ndarray:
    # p in (0, 0.5]
    out = np.empty_like(p)
    tail = p < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(p[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        out[tail] = num / den
    mid = ~tail
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        out[mid] = num / den
    return out


def norm_ppf(p):
    """Inverse standard normal CDF.

    Acklam's rational approximation followed by one Newton step on the lower
    tail (where ``ndtr`` keeps full relative precision); upper half by symmetry.
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0.0) | (p_arr >= 1.0)) or np.any(np.isnan(p_arr)):
        raise ValueError("probability must lie strictly inside (0, 1)")
    flat = np.atleast_1d(p_arr).ravel()
    upper = flat > 0.5
    lo = np.where(upper, 1.0 - flat, flat)
    x = _acklam_lower(lo)
    x = x - (special.ndtr(x) - lo) / norm_pdf(x)
    x = np.where(upper, -x, x)
    x = x.reshape(p_arr.shape)
    return float(x) if x.ndim == 0 else x


def hermite(k: int, y):
    """Probabilists' Hermite polynomial H_k for k in {2, 3, 4, 5}."""
    y = np.asarray(y, dtype=float)
    if k == 2:
        r = y * y - 1.0
    elif k == 3:
        r = y * (y * y - 3.0)
    elif k == 4:
        y2 = y * y
        r = y2 * (y2 - 6.0) + 3.0
    elif k == 5:
        y2 = y * y
        r = y * (y2 * (y2 - 10.0) + 15.0)
    else:
        raise ValueError(f"Hermite polynomial of degree {k} is not provided")
    return float(r) if r.ndim == 0 else r


def student_t_quantile(df: int, p: float) -> float:
    """Student t quantile by inverting the regularized incomplete beta function."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError("probability must lie strictly inside (0, 1)")
    if p == 0.5:
        return 0.0
    tail = min(p, 1.0 - p)
    # P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    x = special.betaincinv(0.5 * df, 0.5, 2.0 * tail)
    t = math.sqrt(df * (1.0 / x - 1.0))
    return t if p > 0.5 else -t


def student_t_sf(df: int, t: float) -> float:
    """Upper tail P(T >= t) of Student's t."""
    return float(special.stdtr(df, -t))


@dataclass(frozen=True)
class DistributionModel:
    """Symmetric location family F((x - location) / scale).

    ``scale`` defaults to 1, i.e. the standard forms with densities
    (2 pi)^-1/2 exp(-x^2/2), e^-x / (1 + e^-x)^2 and exp(-|x|)/2.
    """

    family: str
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def unit_variance(cls, family: str, location: float = 0.0) -> "DistributionModel":
        scale = {"normal": 1.0, "logistic": math.sqrt(3.0) / math.pi,
                 "laplace": 1.0 / math.sqrt(2.0)}[family]
        return cls(family, location, scale)

    def shifted(self, location: float) -> "DistributionModel":
        return DistributionModel(self.family, location, self.scale)

    def _z(self, x):
        return (np.asarray(x, dtype=float) - self.location) / self.scale

    def pdf(self, x):
        z = self._z(x)
        if self.family == "normal":
            f = norm_pdf(z)
        elif self.family == "logistic":
            e = np.exp(-np.abs(z))
            f = e / (1.0 + e) ** 2
        else:
            f = 0.5 * np.exp(-np.abs(z))
        f = f / self.scale
        return float(f) if np.ndim(f) == 0 else f

    def pdf_derivative(self, x):
        """f'(x); for laplace the derivative at the kink is taken as 0."""
        z = self._z(x)
        f = np.asarray(self.pdf(x))
        if self.family == "normal":
            d = -z * f
        elif self.family == "logistic":
            d = -np.tanh(0.5 * z) * f
        else:
            d = -np.sign(z) * f
        d = d / self.scale
        return float(d) if np.ndim(d) == 0 else d

    def cdf(self, x):
        z = self._z(x)
        if self.family == "normal":
            c = special.ndtr(z)
        elif self.family == "logistic":
            c = special.expit(z)
        else:
            half = 0.5 * np.exp(-np.abs(z))
            c = np.where(z < 0, half, 1.0 - half)
        return float(c) if np.ndim(c) == 0 else c

    def quantile(self, p):
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr <= 0.0) | (p_arr >= 1.0)) or np.any(np.isnan(p_arr)):
            raise ValueError("probability must lie strictly inside (0, 1)")
        if self.family == "normal":
            z = np.asarray(norm_ppf(p_arr))
        elif self.family == "logistic":
            z = special.logit(p_arr)
        else:
            z = np.where(p_arr < 0.5, np.log(2.0 * p_arr), -np.log(2.0 * (1.0 - p_arr)))
        q = self.location + self.scale * z
        return float(q) if np.ndim(q) == 0 else q

    def from_uniforms(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF transform; uniforms of exactly 0 are nudged to the smallest double."""
        u = np.where(u <= 0.0, np.finfo(float).tiny, u)
        return np.asarray(self.quantile(u), dtype=float)

    def sample(self, rng: RandomStream, count: int) -> Sample:
        if count < 1:
            raise ValueError("count must be >= 1")
        x = self.from_uniforms(rng.uniforms(count))
        return Sample(x, {"model": self.family, "location": self.location,
                          "scale": self.scale, "seed": rng.seed,
                          "stream": rng.identifier})

    def density_functionals(self) -> dict[str, float]:
        """f(location), f''(location) and the integral of f^3 in closed form.

        For laplace f'' is the one-sided limit at the kink.
        """
        s = self.scale
        if self.family == "normal":
            f0 = 1.0 / (_SQRT2PI * s)
            return {"f0": f0, "f2_0": -f0 / (s * s),
                    "int_f_cubed": 1.0 / (2.0 * math.pi * math.sqrt(3.0) * s * s)}
        if self.family == "logistic":
            return {"f0": 0.25 / s, "f2_0": -1.0 / (8.0 * s ** 3),
                    "int_f_cubed": 1.0 / (30.0 * s * s)}
        return {"f0": 0.5 / s, "f2_0": 0.5 / s ** 3, "int_f_cubed": 1.0 / (12.0 * s * s)}

    def effective_support(self, eps: float = 1e-14) -> tuple[float, float]:
        lo = self.quantile(eps)
        return lo, 2.0 * self.location - lo
