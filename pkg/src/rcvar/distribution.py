"""Heavy-tailed cost distribution machinery.

Five candidate families for annualized cost samples (generalized inverse
Gaussian, exponentially modified normal, normal, reciprocal inverse
Gaussian, Pareto), with density/CDF/quantile evaluation, maximum-likelihood
fitting, the Kolmogorov-Smirnov one-sample test, and the linear
mean-scaling used to read a value-at-risk quantile off a fitted cost
distribution.

Densities are evaluated in standardized coordinates z = (x - loc) / scale.
CDFs use closed forms where the family has one and adaptive quadrature of
the density otherwise; quantiles are solved by a bracketing root-finder on
the CDF. All operations are pure functions and safe to call concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import DistributionError, FitError

__all__ = [
    "DistributionFamily",
    "FittedDistribution",
    "EmpiricalCdf",
    "MIN_FIT_SAMPLE",
    "bessel_k",
    "gig_pdf",
    "pdf",
    "cdf",
    "quantile",
    "mean",
    "ecdf",
    "ks_statistic",
    "ks_pvalue",
    "fit",
    "fit_all",
    "scale_to_mean",
]

# Minimum sample size accepted by fit(); shorter series carry too little
# tail information for a meaningful goodness-of-fit ranking.
MIN_FIT_SAMPLE = 30

_QUAD_OPTS = dict(epsabs=1e-10, epsrel=1e-10, limit=200)


class DistributionFamily(str, enum.Enum):
    """Closed set of candidate cost distribution families."""

    GENINVGAUSS = "geninvgauss"
    EXPONNORM = "exponnorm"
    NORM = "norm"
    RECIPINVGAUSS = "recipinvgauss"
    PARETO = "pareto"

    @classmethod
    def from_name(cls, name: str) -> "DistributionFamily":
        """Resolve a family from its short or descriptive name, case-insensitively."""
        key = name.strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        aliases = {
            "geninvgauss": cls.GENINVGAUSS,
            "generalizedinversegaussian": cls.GENINVGAUSS,
            "geninversegaussian": cls.GENINVGAUSS,
            "exponnorm": cls.EXPONNORM,
            "exponentiallymodifiednormal": cls.EXPONNORM,
            "norm": cls.NORM,
            "normal": cls.NORM,
            "recipinvgauss": cls.RECIPINVGAUSS,
            "reciprocalinversegaussian": cls.RECIPINVGAUSS,
            "reciprocalinvgauss": cls.RECIPINVGAUSS,
            "pareto": cls.PARETO,
        }
        try:
            return aliases[key]
        except KeyError:
            raise DistributionError(f"unknown distribution family '{name}'") from None

    @property
    def n_shape_params(self) -> int:
        return {"geninvgauss": 2, "exponnorm": 1, "norm": 0, "recipinvgauss": 1, "pareto": 1}[self.value]


@dataclass(frozen=True)
class FittedDistribution:
    """A distribution family pinned to concrete parameters.

    ``shape`` is the family-specific parameter vector: (p, b) for the
    generalized inverse Gaussian, (K,) for the exponentially modified
    normal, (mu,) for the reciprocal inverse Gaussian, (b,) for Pareto,
    and empty for the normal. ``ks_statistic`` and ``p_value`` are filled
    by :func:`fit` against the sample the parameters were estimated from.
    """

    family: DistributionFamily
    shape: tuple[float, ...]
    loc: float
    scale: float
    ks_statistic: float | None = None
    p_value: float | None = None

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DistributionError(f"scale must be positive and finite, got {self.scale}")
        if self.loc < 0 or not math.isfinite(self.loc):
            raise DistributionError(f"loc must be a non-negative finite offset, got {self.loc}")
        if len(self.shape) != self.family.n_shape_params:
            raise DistributionError(
                f"{self.family.value} takes {self.family.n_shape_params} shape parameter(s), "
                f"got {len(self.shape)}"
            )
        if self.family is DistributionFamily.GENINVGAUSS and not self.shape[1] > 0:
            raise DistributionError(f"geninvgauss b must be positive, got {self.shape[1]}")
        if self.family in (DistributionFamily.EXPONNORM, DistributionFamily.RECIPINVGAUSS,
                           DistributionFamily.PARETO) and not self.shape[0] > 0:
            raise DistributionError(
                f"{self.family.value} shape must be positive, got {self.shape[0]}")
        for name, value in (("ks_statistic", self.ks_statistic), ("p_value", self.p_value)):
            if value is not None and not (0.0 <= value <= 1.0):
                raise DistributionError(f"{name} must lie in [0, 1], got {value}")

    def to_dict(self) -> dict:
        out = {
            "family": self.family.value,
            "shape": list(self.shape),
            "loc": self.loc,
            "scale": self.scale,
        }
        if self.ks_statistic is not None:
            out["ks_statistic"] = self.ks_statistic
        if self.p_value is not None:
            out["p_value"] = self.p_value
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "FittedDistribution":
        return cls(
            family=DistributionFamily.from_name(doc["family"]),
            shape=tuple(float(v) for v in doc.get("shape", ())),
            loc=float(doc.get("loc", 0.0)),
            scale=float(doc.get("scale", 1.0)),
            ks_statistic=doc.get("ks_statistic"),
            p_value=doc.get("p_value"),
        )


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def bessel_k(order: float, x: float) -> float:
    """Modified Bessel function of the second kind K_order(x), x > 0."""
    if x <= 0:
        raise DistributionError(f"bessel_k requires x > 0, got {x}")
    # K is even in the order and smooth at 0; subnormal orders trip the
    # underlying routine, so snap them to 0 (exact at double precision)
    order = abs(order)
    if order < 1e-300:
        order = 0.0
    return float(special.kv(order, x))


# ---------------------------------------------------------------------------
# Standardized family definitions
#
# Each family provides, in z-coordinates:
#   logpdf(z, *shape)  vectorized log-density
#   cdf(z, *shape)     scalar CDF (closed form or quadrature)
#   mean(*shape)       first moment, raising if undefined
#   anchor(*shape)     a point inside the support used to seed brackets
#   z_min               support lower edge in z (None for full real line)
# ---------------------------------------------------------------------------

def _gig_log_norm(p: float, b: float) -> float:
    # log of 2*K_p(b)*e^b; the e^b factor cancels the one taken out of the
    # exponent below, keeping both finite for large b
    return math.log(2.0) + math.log(special.kve(p, b))


def _gig_logpdf(z: np.ndarray, p: float, b: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.full(z.shape, -np.inf)
    pos = z > 0
    zp = z[pos]
    out[pos] = (p - 1.0) * np.log(zp) - 0.5 * b * (zp + 1.0 / zp - 2.0) - _gig_log_norm(p, b)
    return out

def _gig_mode(p: float, b: float) -> float:
    return ((p - 1.0) + math.hypot(p - 1.0, b)) / b


def _gig_cdf(z: float, p: float, b: float) -> float:
    if z <= 0:
        return 0.0
    norm = 2.0 * float(special.kve(p, b))

    def integrand(w):
        return w ** (p - 1.0) * math.exp(-0.5 * b * (w + 1.0 / w - 2.0))

    mode = _gig_mode(p, b)
    if z <= mode:
        # mass to the left of the mode: integrand increases toward z
        value, _ = integrate.quad(integrand, 0.0, z, **_QUAD_OPTS)
        return min(max(value / norm, 0.0), 1.0)
    tail, _ = integrate.quad(integrand, z, np.inf, **_QUAD_OPTS)
    return min(max(1.0 - tail / norm, 0.0), 1.0)


def _gig_mean(p: float, b: float) -> float:
    return float(special.kve(p + 1.0, b) / special.kve(p, b))


def _rig_logpdf(z: np.ndarray, mu: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.full(z.shape, -np.inf)
    pos = z > 0
    zp = z[pos]
    out[pos] = -0.5 * np.log(2.0 * np.pi * zp) - (1.0 - mu * zp) ** 2 / (2.0 * zp * mu * mu)
    return out


def _invgauss_cdf(y: float, mu: float) -> float:
    # standard inverse Gaussian (lambda = 1) CDF, stable for small mu
    sq = math.sqrt(y)
    term1 = special.ndtr((y / mu - 1.0) / sq)
    log_term2 = 2.0 / mu + special.log_ndtr(-(y / mu + 1.0) / sq)
    return float(term1 + math.exp(log_term2))


def _rig_cdf(z: float, mu: float) -> float:
    if z <= 0:
        return 0.0
    # X = 1/Y with Y inverse Gaussian: P(X <= z) = P(Y >= 1/z)
    return min(max(1.0 - _invgauss_cdf(1.0 / z, mu), 0.0), 1.0)


def _rig_mean(mu: float) -> float:
    return 1.0 + 1.0 / mu


def _exponnorm_logpdf(z: np.ndarray, k: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return -np.log(k) + 0.5 / (k * k) - z / k + special.log_ndtr(z - 1.0 / k)


def _exponnorm_cdf(z: float, k: float) -> float:
    value = special.ndtr(z) - math.exp(0.5 / (k * k) - z / k + float(special.log_ndtr(z - 1.0 / k)))
    return min(max(float(value), 0.0), 1.0)


def _norm_logpdf(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return -0.5 * z * z - 0.5 * math.log(2.0 * math.pi)


def _pareto_logpdf(z: np.ndarray, b: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.full(z.shape, -np.inf)
    ok = z >= 1.0
    out[ok] = math.log(b) - (b + 1.0) * np.log(z[ok])
    return out


def _pareto_cdf(z: float, b: float) -> float:
    if z < 1.0:
        return 0.0
    return 1.0 - z ** (-b)


def _pareto_mean(b: float) -> float:
    if b <= 1.0:
        raise DistributionError(f"pareto mean is undefined for shape <= 1, got {b}")
    return b / (b - 1.0)


_LOGPDF = {
    DistributionFamily.GENINVGAUSS: _gig_logpdf,
    DistributionFamily.EXPONNORM: _exponnorm_logpdf,
    DistributionFamily.NORM: lambda z: _norm_logpdf(z),
    DistributionFamily.RECIPINVGAUSS: _rig_logpdf,
    DistributionFamily.PARETO: _pareto_logpdf,
}

_CDF = {
    DistributionFamily.GENINVGAUSS: _gig_cdf,
    DistributionFamily.EXPONNORM: _exponnorm_cdf,
    DistributionFamily.NORM: lambda z: float(special.ndtr(z)),
    DistributionFamily.RECIPINVGAUSS: _rig_cdf,
    DistributionFamily.PARETO: _pareto_cdf,
}

_MEAN = {
    DistributionFamily.GENINVGAUSS: _gig_mean,
    DistributionFamily.EXPONNORM: lambda k: k,
    DistributionFamily.NORM: lambda: 0.0,
    DistributionFamily.RECIPINVGAUSS: _rig_mean,
    DistributionFamily.PARETO: _pareto_mean,
}

# support lower edge in z-coordinates; None means the full real line
_Z_MIN = {
    DistributionFamily.GENINVGAUSS: 0.0,
    DistributionFamily.EXPONNORM: None,
    DistributionFamily.NORM: None,
    DistributionFamily.RECIPINVGAUSS: 0.0,
    DistributionFamily.PARETO: 1.0,
}


def _anchor(dist: FittedDistribution) -> float:
    """A z-point comfortably inside the support, used to seed brackets."""
    family, shape = dist.family, dist.shape
    if family is DistributionFamily.NORM:
        return 0.0
    if family is DistributionFamily.EXPONNORM:
        return shape[0]
    if family is DistributionFamily.PARETO:
        return 2.0
    if family is DistributionFamily.GENINVGAUSS:
        return max(_gig_mode(*shape), _gig_mean(*shape) * 0.5)
    return _rig_mean(shape[0])


def pdf(x: float, dist: FittedDistribution) -> float:
    """Probability density of ``dist`` at ``x`` (0 outside the support)."""
    z = (x - dist.loc) / dist.scale
    logp = float(_LOGPDF[dist.family](np.array([z]), *dist.shape)[0])
    if logp == -np.inf:
        return 0.0
    return math.exp(logp) / dist.scale


def gig_pdf(x: float, dist: FittedDistribution) -> float:
    """Generalized inverse Gaussian density at ``x``.

    With z = (x - loc)/scale the density is
    z^(p-1) * exp(-b (z + 1/z) / 2) / (2 K_p(b) scale) for z > 0 and 0
    otherwise, K_p the modified Bessel function of the second kind.
    """
    if dist.family is not DistributionFamily.GENINVGAUSS:
        raise DistributionError(f"gig_pdf requires a geninvgauss distribution, got {dist.family.value}")
    return pdf(x, dist)


def cdf(x: float, dist: FittedDistribution) -> float:
    """P(X <= x) for the fitted distribution."""
    z = (x - dist.loc) / dist.scale
    return _CDF[dist.family](z, *dist.shape)


def quantile(q: float, dist: FittedDistribution) -> float:
    """The x with cdf(x, dist) = q, solved by a bracketing root-finder."""
    if not 0.0 < q < 1.0:
        raise DistributionError(f"quantile requires q in (0, 1), got {q}")

    def f(z):
        return _CDF[dist.family](z, *dist.shape) - q

    z_min = _Z_MIN[dist.family]
    lo = hi = _anchor(dist)
    if z_min is None:
        step = 1.0
        while f(lo) > 0:
            lo -= step
            step *= 2.0
        step = 1.0
        while f(hi) < 0:
            hi += step
            step *= 2.0
    else:
        while f(lo) > 0 and lo > 1e-300:
            lo = z_min + (lo - z_min) / 2.0 if z_min > 0 else lo / 2.0
        while f(hi) < 0:
            hi = z_min + (hi - z_min) * 2.0 if z_min > 0 else hi * 2.0
            if hi > 1e300:
                raise DistributionError("quantile bracket expansion failed")
    if lo == hi:
        z_root = lo
    else:
        z_root = optimize.brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=300)
    x = dist.loc + dist.scale * z_root
    if not math.isfinite(x):
        raise DistributionError(
            f"quantile({q}) of {dist.family.value} overflows the representable range")
    return x


def mean(dist: FittedDistribution) -> float:
    """First moment of the fitted distribution; raises if undefined."""
    return dist.loc + dist.scale * _MEAN[dist.family](*dist.shape)


def scale_to_mean(dist: FittedDistribution, target_mean: float) -> FittedDistribution:
    """Rescale loc and scale so the distribution's mean equals ``target_mean``.

    Shape parameters are untouched, so every quantile scales by the same
    factor target_mean / mean(dist): the shape of the risk curve is
    preserved and only its monetary magnitude moves.
    """
    if not (target_mean > 0 and math.isfinite(target_mean)):
        raise DistributionError(f"target_mean must be positive and finite, got {target_mean}")
    current = mean(dist)
    if not (current > 0 and math.isfinite(current)):
        raise DistributionError(f"distribution mean must be positive and finite, got {current}")
    r = target_mean / current
    return replace(dist, loc=dist.loc * r, scale=dist.scale * r)


# ---------------------------------------------------------------------------
# Empirical CDF and Kolmogorov-Smirnov test
# ---------------------------------------------------------------------------

def _as_costs(sample) -> np.ndarray:
    values = np.asarray(getattr(sample, "costs", sample), dtype=float)
    if values.ndim != 1:
        raise DistributionError("sample must be a one-dimensional series of costs")
    return values


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function F(x) = (#values <= x) / n."""

    sorted_values: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.sorted_values)

    def __call__(self, x: float) -> float:
        return np.searchsorted(self.sorted_values, x, side="right") / self.n


def ecdf(sample) -> EmpiricalCdf:
    """Empirical CDF of a cost sample (ascending sort of the values)."""
    values = _as_costs(sample)
    if values.size == 0:
        raise DistributionError("empty sample")
    return EmpiricalCdf(sorted_values=tuple(np.sort(values)))


def ks_statistic(sample, dist: FittedDistribution) -> float:
    """Kolmogorov-Smirnov distance between the sample ECDF and ``dist``.

    The supremum over the sorted points of the vertical distances between
    the empirical step function (both step edges) and the reference CDF.
    """
    values = np.sort(_as_costs(sample))
    n = values.size
    if n == 0:
        raise DistributionError("empty sample")
    f = np.array([cdf(x, dist) for x in values])
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_pvalue(d: float, n: int) -> float:
    """Asymptotic Kolmogorov tail probability of a KS distance ``d`` at size ``n``.

    Uses the alternating series Q(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2)
    with the Stephens small-sample effective lambda
    (sqrt(n) + 0.12 + 0.11/sqrt(n)) * d; terms below 1e-12 are dropped and
    the result is clamped to [0, 1]. Returns 1 when the series does not
    contract (d near 0).
    """
    if not 0.0 <= d <= 1.0:
        raise DistributionError(f"ks statistic must lie in [0, 1], got {d}")
    if n < 1:
        raise DistributionError(f"sample size must be >= 1, got {n}")
    if d == 0.0:
        return 1.0
    sqrt_n = math.sqrt(n)
    lam = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d
    total = 0.0
    sign = 1.0
    for k in range(1, 201):
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < 1e-12:
            return min(max(2.0 * total, 0.0), 1.0)
        total += sign * term
        sign = -sign
    return 1.0


# ---------------------------------------------------------------------------
# Maximum-likelihood fitting
# ---------------------------------------------------------------------------

def _start_points(family: DistributionFamily, y: np.ndarray) -> list[np.ndarray]:
    """Deterministic simplex starting points, in standardized sample units.

    Moment-based where the family has tractable moments; the families with
    a bounded support additionally try a lifted location at half the sample
    minimum.
    """
    m = float(np.mean(y))
    s = float(np.std(y))
    y_min = float(np.min(y))
    if family is DistributionFamily.NORM:
        return [np.array([m, s])]
    if family is DistributionFamily.EXPONNORM:
        g = float(np.clip(_skewness(y), 0.01, 1.95))
        k = optimize.brentq(lambda k: 2.0 * k ** 3 / (1.0 + k * k) ** 1.5 - g, 1e-6, 50.0)
        scale = s / math.sqrt(1.0 + k * k)
        loc = max(m - k * scale, 0.0)
        # (tau, loc, sigma) fitting coordinates, see _nll
        return [np.array([k * scale, loc, scale])]
    if family is DistributionFamily.PARETO:
        starts = []
        for loc in (0.0, y_min / 2.0):
            edge = y_min * (1.0 - 1e-9)
            scale = edge - loc
            b = max(len(y) / float(np.sum(np.log(y / edge))), 0.1)
            starts.append(np.array([b, loc, scale]))
        return starts
    if family is DistributionFamily.RECIPINVGAUSS:
        starts = []
        for loc in (0.0, y_min / 2.0):
            mc = m - loc
            scale = (-mc + math.sqrt(mc * mc + 4.0 * s * s)) / 2.0
            scale = max(scale, 1e-6)
            ratio = mc / scale - 1.0
            mu = 1.0 / ratio if ratio > 1e-6 else 1.0
            starts.append(np.array([mu, loc, scale]))
        return starts
    # geninvgauss: a coarse net of shape starts, each with the scale chosen
    # so the implied mean matches the sample mean
    starts = []
    for p0, b0 in ((1.0, 1.0), (0.5, 0.3), (0.0, 0.3), (-0.5, 0.5), (-1.0, 1.0)):
        for loc in (0.0, y_min / 2.0, 0.9 * y_min):
            scale = max((m - loc) / _gig_mean(p0, b0), 1e-6)
            starts.append(np.array([p0, b0, loc, scale]))
    return starts


def _skewness(y: np.ndarray) -> float:
    s = np.std(y)
    if s == 0:
        return 0.0
    return float(np.mean(((y - np.mean(y)) / s) ** 3))


def _nll(theta: np.ndarray, family: DistributionFamily, y: np.ndarray) -> float:
    n_shape = family.n_shape_params
    shape = theta[:n_shape]
    loc, scale = theta[n_shape], theta[n_shape + 1]
    if family is DistributionFamily.EXPONNORM:
        # fitting coordinates are (tau, loc, sigma) with tau the exponential
        # component's mean: the near-exponential ridge (K -> inf, scale -> 0)
        # then collapses instead of diverging, so the simplex can terminate
        tau, sigma = shape[0], scale
        if tau <= 0 or sigma <= 0:
            return np.inf
        shape = np.array([tau / sigma])
    if scale <= 0 or loc < 0:
        return np.inf
    if family in (DistributionFamily.RECIPINVGAUSS, DistributionFamily.PARETO) and shape[0] <= 0:
        return np.inf
    if family is DistributionFamily.GENINVGAUSS and shape[1] <= 0:
        return np.inf
    z = (y - loc) / scale
    logp = _LOGPDF[family](z, *shape) - math.log(scale)
    if not np.all(np.isfinite(logp)):
        return np.inf
    return -float(np.sum(logp))


def fit(sample, family: DistributionFamily | str) -> FittedDistribution:
    """Maximum-likelihood fit of one family to a cost sample.

    Parameters are found by derivative-free Nelder-Mead simplex search on
    the negative log-likelihood, run from the deterministic starting points
    of :func:`_start_points` on the sample standardized by its own standard
    deviation. For families supported on [loc, +inf) the location is kept
    inside [0, min(sample)) so every observation stays in the support. The
    returned distribution carries its KS statistic and p-value against the
    fitted CDF.
    """
    family = DistributionFamily.from_name(family) if isinstance(family, str) else family
    x = _as_costs(sample)
    if x.size < MIN_FIT_SAMPLE:
        raise FitError(f"sample below threshold: need n >= {MIN_FIT_SAMPLE}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise FitError("sample contains non-finite values")
    if float(np.std(x)) == 0.0:
        raise FitError("degenerate sample: zero variance")
    if _Z_MIN[family] is not None and float(np.min(x)) <= 0.0:
        raise FitError(f"{family.value} requires strictly positive observations")

    s = float(np.std(x))
    y = x / s
    best = None
    last_result = None
    for theta0 in _start_points(family, y):
        result = optimize.minimize(
            _nll, theta0, args=(family, y), method="Nelder-Mead",
            options=dict(maxiter=20000, maxfev=20000, xatol=1e-9, fatol=1e-9),
        )
        last_result = result
        if result.success and np.isfinite(result.fun):
            if best is None or result.fun < best.fun:
                best = result
    if best is None:
        detail = last_result.message if last_result is not None else "no starting point"
        raise FitError(f"{family.value} fit did not converge: {detail}")

    n_shape = family.n_shape_params
    theta = best.x
    shape = tuple(float(v) for v in theta[:n_shape])
    if family is DistributionFamily.EXPONNORM:
        shape = (float(theta[0] / theta[2]),)
    fitted = FittedDistribution(
        family=family,
        shape=shape,
        loc=float(theta[n_shape] * s),
        scale=float(theta[n_shape + 1] * s),
    )
    d = ks_statistic(x, fitted)
    return replace(fitted, ks_statistic=d, p_value=ks_pvalue(d, x.size))


def fit_all(sample, families: Sequence[DistributionFamily] | None = None) -> list[FittedDistribution]:
    """Fit every candidate family and rank the results by descending p-value."""
    families = list(families) if families is not None else list(DistributionFamily)
    results = [fit(sample, family) for family in families]
    results.sort(key=lambda d: (-(d.p_value or 0.0), d.family.value))
    return results
