"""Univariate distributions with density, CDF and quantile evaluation.

Every distribution exposes the triple (pdf, cdf, quantile) plus a log-density,
which is all the sampling and importance-sampling machinery needs.  The
quantile function is the generalized inverse Q(p) = inf{x : F(x) >= p}, so the
same interface covers continuous laws and laws with atoms.

The module also provides the equiprobable quantile-block partition
w_s = Q(s/m) and the conditional law of a value drawn uniformly inside one
block, which are the building blocks of stratified sampling.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError, NonConvergenceError

__all__ = [
    "Distribution",
    "Uniform01",
    "Normal",
    "Beta",
    "Gamma",
    "Discrete",
    "Custom",
    "BlockPartition",
    "block_boundaries",
    "conditional_pdf",
    "conditional_cdf",
    "conditional_quantile",
    "distribution_from_name",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Numerical quantile inversion: absolute tolerance on the quantile, residual
# tolerance on the CDF (the residual criterion keeps |F(Q(p)) - p| small even
# where the density is steep), and an iteration cap.
_INVERT_TOL = 1e-12
_INVERT_F_TOL = 1e-13
_INVERT_MAX_ITER = 200


def _as_float_array(x):
    return np.asarray(x, dtype=np.float64)


def _scalar_or_array(out, x_in):
    out = np.asarray(out)
    if np.ndim(x_in) == 0:
        return float(out)
    return out


def _invert_monotone_cdf(cdf, pdf, p, lo, hi):
    """Invert a continuous monotone CDF by bracketed bisection with Newton steps.

    Parameters
    ----------
    cdf, pdf : callables
        Vectorized CDF and its derivative.
    p : ndarray
        Probabilities strictly inside (0, 1).
    lo, hi : float or ndarray
        Bracket with cdf(lo) <= p <= cdf(hi).

    Returns
    -------
    ndarray
        x with |x - Q(p)| below the module tolerance.

    Raises
    ------
    NonConvergenceError
        If the bracket has not shrunk below tolerance after the iteration cap.
    """
    p = _as_float_array(p)
    lo = np.broadcast_to(_as_float_array(lo), p.shape).copy()
    hi = np.broadcast_to(_as_float_array(hi), p.shape).copy()
    x = 0.5 * (lo + hi)
    err = np.full(p.shape, np.inf)
    done = np.zeros(p.shape, dtype=bool)
    for _ in range(_INVERT_MAX_ITER):
        F = cdf(x)
        err = np.where(done, err, np.abs(F - p))
        # Elements are frozen once converged, so each quantile depends only
        # on its own probability, never on what else shares the array.
        active = ~done
        too_low = F < p
        lo = np.where(active & too_low, x, lo)
        hi = np.where(active & ~too_low, x, hi)
        width = hi - lo
        saturated = width <= 4.0 * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))
        done = done | (
            (err <= _INVERT_F_TOL)
            | ((width <= _INVERT_TOL) & (err <= 1e-10))
            | saturated
        )
        if np.all(done):
            return x
        d = pdf(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            newton = x - (F - p) / d
        inside = (d > 0) & np.isfinite(newton) & (newton > lo) & (newton < hi)
        x = np.where(done, x, np.where(inside, newton, 0.5 * (lo + hi)))
    if np.all(err <= 1e-9):
        return x
    raise NonConvergenceError(
        f"quantile inversion did not reach tolerance {_INVERT_TOL} "
        f"in {_INVERT_MAX_ITER} iterations"
    )


class Distribution:
    """Base class: a univariate law with pdf, cdf and quantile function.

    Subclasses set ``name``, ``support`` and implement ``pdf``, ``logpdf``,
    ``cdf`` and ``_quantile_inner`` (quantile for p strictly inside (0, 1)).
    All evaluation methods are pure, vectorized over numpy arrays, and return
    a float for scalar input.
    """

    name: str = "distribution"
    support: tuple[float, float] = (-np.inf, np.inf)

    def pdf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def _quantile_inner(self, p):
        """Quantile for probabilities strictly inside (0, 1)."""
        raise NotImplementedError

    def quantile(self, p):
        """Generalized inverse CDF, Q(p) = inf{x : F(x) >= p}.

        p = 0 or p = 1 is allowed only when the corresponding support
        endpoint is finite; otherwise a DomainError is raised.
        """
        p_arr = _as_float_array(p)
        if np.any(np.isnan(p_arr)) or np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
            raise DomainError(f"quantile probability outside [0, 1]: {p!r}")
        lo, hi = self.support
        at_zero = p_arr == 0.0
        at_one = p_arr == 1.0
        if np.any(at_zero) and not np.isfinite(lo):
            raise DomainError(f"Q(0) is -inf for {self.name}; not a real quantile")
        if np.any(at_one) and not np.isfinite(hi):
            raise DomainError(f"Q(1) is +inf for {self.name}; not a real quantile")
        interior = ~(at_zero | at_one)
        out = np.empty(p_arr.shape, dtype=np.float64)
        out[at_zero] = lo
        out[at_one] = hi
        if np.any(interior):
            out[interior] = self._quantile_inner(p_arr[interior])
        return _scalar_or_array(out, p)

    def params(self) -> dict:
        """Distribution parameters, for reports and artifacts."""
        return {}

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class Uniform01(Distribution):
    """Standard uniform law on (0, 1)."""

    name = "uniform"
    support = (0.0, 1.0)

    def pdf(self, x):
        x_arr = _as_float_array(x)
        out = np.where((x_arr >= 0.0) & (x_arr <= 1.0), 1.0, 0.0)
        return _scalar_or_array(out, x)

    def logpdf(self, x):
        x_arr = _as_float_array(x)
        out = np.where((x_arr >= 0.0) & (x_arr <= 1.0), 0.0, -np.inf)
        return _scalar_or_array(out, x)

    def cdf(self, x):
        out = np.clip(_as_float_array(x), 0.0, 1.0)
        return _scalar_or_array(out, x)

    def _quantile_inner(self, p):
        return p


class Normal(Distribution):
    """Normal law with mean ``mu`` and standard deviation ``sigma``."""

    name = "normal"
    support = (-np.inf, np.inf)

    def __init__(self, mu: float = 0.0, sigma: float = 1.0):
        if not (sigma > 0.0 and np.isfinite(sigma)) or not np.isfinite(mu):
            raise DomainError(f"normal requires finite mu and sigma > 0, got {mu}, {sigma}")
        self.mu = float(mu)
        self.sigma = float(sigma)

    def pdf(self, x):
        return _scalar_or_array(np.exp(self.logpdf(_as_float_array(x))), x)

    def logpdf(self, x):
        z = (_as_float_array(x) - self.mu) / self.sigma
        out = -0.5 * z * z - math.log(self.sigma) - _LOG_SQRT_2PI
        return _scalar_or_array(out, x)

    def cdf(self, x):
        z = (_as_float_array(x) - self.mu) / self.sigma
        return _scalar_or_array(special.ndtr(z), x)

    def _quantile_inner(self, p):
        return self.mu + self.sigma * special.ndtri(p)

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma}


class Beta(Distribution):
    """Beta law on (0, 1) with shape parameters ``a`` and ``b``.

    The CDF is the regularized incomplete beta function; the quantile is
    obtained by bracketed bisection/Newton inversion on [0, 1].
    """

    name = "beta"
    support = (0.0, 1.0)

    def __init__(self, a: float, b: float):
        if not (a > 0.0 and b > 0.0 and np.isfinite(a) and np.isfinite(b)):
            raise DomainError(f"beta requires a > 0 and b > 0, got {a}, {b}")
        self.a = float(a)
        self.b = float(b)
        self._log_norm = special.betaln(self.a, self.b)

    def logpdf(self, x):
        x_arr = _as_float_array(x)
        inside = (x_arr > 0.0) & (x_arr < 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = np.where(inside, x_arr, 0.5)
            out = np.where(
                inside,
                (self.a - 1.0) * np.log(xs)
                + (self.b - 1.0) * np.log1p(-xs)
                - self._log_norm,
                -np.inf,
            )
        # Endpoint density is finite (and nonzero) only for unit shape.
        if self.a == 1.0:
            out = np.where(x_arr == 0.0, -self._log_norm, out)
        if self.b == 1.0:
            out = np.where(x_arr == 1.0, -self._log_norm, out)
        return _scalar_or_array(out, x)

    def pdf(self, x):
        return _scalar_or_array(np.exp(self.logpdf(_as_float_array(x))), x)

    def cdf(self, x):
        x_arr = np.clip(_as_float_array(x), 0.0, 1.0)
        return _scalar_or_array(special.betainc(self.a, self.b, x_arr), x)

    def _quantile_inner(self, p):
        # Invert in the lower tail of whichever orientation keeps the root
        # near 0, where floats have far more resolution than near 1.
        def density(a, b):
            def f(t):
                ts = np.clip(t, np.finfo(float).tiny, 1.0 - 1e-17)
                return np.exp(
                    (a - 1.0) * np.log(ts) + (b - 1.0) * np.log1p(-ts) - self._log_norm
                )

            return f

        out = np.empty_like(p)
        low = p <= 0.5
        if np.any(low):
            cdf = lambda t: special.betainc(self.a, self.b, t)  # noqa: E731
            out[low] = _invert_monotone_cdf(
                cdf, density(self.a, self.b), p[low], 0.0, 1.0
            )
        if np.any(~low):
            cdf = lambda t: special.betainc(self.b, self.a, t)  # noqa: E731
            out[~low] = 1.0 - _invert_monotone_cdf(
                cdf, density(self.b, self.a), 1.0 - p[~low], 0.0, 1.0
            )
        return out

    def params(self):
        return {"a": self.a, "b": self.b}


class Gamma(Distribution):
    """Gamma law with ``shape`` and ``rate``: density proportional to
    x^(shape-1) * exp(-rate * x) on (0, inf)."""

    name = "gamma"

    def __init__(self, shape: float, rate: float):
        if not (shape > 0.0 and rate > 0.0 and np.isfinite(shape) and np.isfinite(rate)):
            raise DomainError(f"gamma requires shape > 0 and rate > 0, got {shape}, {rate}")
        self.shape = float(shape)
        self.rate = float(rate)
        self.support = (0.0, np.inf)
        self._log_norm = self.shape * math.log(self.rate) - special.gammaln(self.shape)

    def logpdf(self, x):
        x_arr = _as_float_array(x)
        inside = x_arr > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = np.where(inside, x_arr, 1.0)
            out = np.where(
                inside,
                self._log_norm + (self.shape - 1.0) * np.log(xs) - self.rate * xs,
                -np.inf,
            )
        if self.shape == 1.0:
            out = np.where(x_arr == 0.0, self._log_norm, out)
        return _scalar_or_array(out, x)

    def pdf(self, x):
        return _scalar_or_array(np.exp(self.logpdf(_as_float_array(x))), x)

    def cdf(self, x):
        x_arr = np.maximum(_as_float_array(x), 0.0)
        return _scalar_or_array(special.gammainc(self.shape, self.rate * x_arr), x)

    def _quantile_inner(self, p):
        # Invert the standard (rate 1) law, then rescale by the rate.
        cdf = lambda t: special.gammainc(self.shape, t)  # noqa: E731
        pdf = lambda t: np.exp(  # noqa: E731
            (self.shape - 1.0) * np.log(np.maximum(t, np.finfo(float).tiny))
            - t
            - special.gammaln(self.shape)
        )
        hi = np.full(np.shape(p), self.shape + 10.0 * math.sqrt(self.shape) + 10.0)
        pmax = np.max(p)
        for _ in range(200):
            if special.gammainc(self.shape, np.max(hi)) >= pmax:
                break
            hi = hi * 2.0
        t = _invert_monotone_cdf(cdf, pdf, p, 0.0, hi)
        return t / self.rate

    def params(self):
        return {"shape": self.shape, "rate": self.rate}


class Discrete(Distribution):
    """Law with finitely many atoms.

    ``points`` must be strictly increasing; ``probs`` are positive masses
    summing to one.  ``pdf`` returns the mass function; the quantile is a
    right-continuous step function satisfying Q(F(x_j)) = x_j at every atom.
    """

    name = "discrete"

    def __init__(self, points, probs):
        pts = _as_float_array(points)
        pr = _as_float_array(probs)
        if pts.ndim != 1 or pr.shape != pts.shape or pts.size == 0:
            raise DomainError("discrete requires matching 1-d points and probs")
        if np.any(np.diff(pts) <= 0.0):
            raise DomainError("discrete points must be strictly increasing")
        if np.any(pr <= 0.0):
            raise DomainError("discrete probabilities must be positive")
        total = pr.sum()
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"discrete probabilities must sum to 1, got {total}")
        self.points = pts
        self.probs = pr / total
        self._cum = np.cumsum(self.probs)
        self._cum[-1] = 1.0  # guard cumsum rounding so Q(1) is the last atom
        self.support = (float(pts[0]), float(pts[-1]))

    def pdf(self, x):
        x_arr = _as_float_array(x)
        idx = np.searchsorted(self.points, x_arr)
        idx_c = np.minimum(idx, self.points.size - 1)
        hit = self.points[idx_c] == x_arr
        out = np.where(hit, self.probs[idx_c], 0.0)
        return _scalar_or_array(out, x)

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            out = np.log(self.pdf(_as_float_array(x)))
        return _scalar_or_array(out, x)

    def cdf(self, x):
        x_arr = _as_float_array(x)
        idx = np.searchsorted(self.points, x_arr, side="right")
        cum = np.concatenate(([0.0], self._cum))
        return _scalar_or_array(cum[idx], x)

    def _quantile_inner(self, p):
        idx = np.searchsorted(self._cum, p, side="left")
        return self.points[idx]

    def params(self):
        return {"points": self.points.tolist(), "probs": self.probs.tolist()}


class Custom(Distribution):
    """Distribution defined by user-supplied callables.

    Only a quantile function is required (enough for inverse-transform
    sampling); density and CDF callables are optional and a DomainError is
    raised if a missing piece is requested.
    """

    name = "custom"

    def __init__(self, quantile, pdf=None, cdf=None, logpdf=None,
                 support=(-np.inf, np.inf)):
        self._quantile = quantile
        self._pdf = pdf
        self._cdf = cdf
        self._logpdf = logpdf
        self.support = (float(support[0]), float(support[1]))

    def pdf(self, x):
        if self._pdf is None:
            raise DomainError("custom distribution has no density function")
        return _scalar_or_array(_as_float_array(self._pdf(_as_float_array(x))), x)

    def logpdf(self, x):
        if self._logpdf is not None:
            return _scalar_or_array(_as_float_array(self._logpdf(_as_float_array(x))), x)
        with np.errstate(divide="ignore"):
            out = np.log(self.pdf(_as_float_array(x)))
        return _scalar_or_array(out, x)

    def cdf(self, x):
        if self._cdf is None:
            raise DomainError("custom distribution has no CDF")
        return _scalar_or_array(_as_float_array(self._cdf(_as_float_array(x))), x)

    def _quantile_inner(self, p):
        return _as_float_array(self._quantile(p))


class BlockPartition:
    """Equiprobable quantile-block boundaries w_s = Q(s/m), s = 0..m.

    For a continuous law each block (w_{s-1}, w_s] carries probability
    exactly 1/m.  Outer boundaries may be infinite sentinels when the
    support is unbounded.
    """

    def __init__(self, m: int, boundaries):
        self.m = int(m)
        self.boundaries = _as_float_array(boundaries)

    def __repr__(self):
        return f"BlockPartition(m={self.m}, boundaries={self.boundaries!r})"


def block_boundaries(dist: Distribution, m: int) -> BlockPartition:
    """Partition the support of ``dist`` into ``m`` equiprobable blocks."""
    if m < 1:
        raise DomainError(f"block count must be >= 1, got {m}")
    w = np.empty(m + 1, dtype=np.float64)
    w[0], w[m] = dist.support
    if m > 1:
        w[1:m] = dist.quantile(np.arange(1, m) / m)
    return BlockPartition(m, w)


def conditional_pdf(dist: Distribution, m: int, s: int, x):
    """Density of a value drawn from block ``s`` of the ``m``-block partition:
    m * f(x) on (w_{s-1}, w_s], zero elsewhere."""
    w = block_boundaries(dist, m).boundaries
    _check_block_index(m, s)
    x_arr = _as_float_array(x)
    inside = (x_arr > w[s - 1]) & (x_arr <= w[s])
    out = np.where(inside, m * dist.pdf(x_arr), 0.0)
    return _scalar_or_array(out, x)


def conditional_cdf(dist: Distribution, m: int, s: int, x):
    """CDF of Q(U) for U uniform on ((s-1)/m, s/m]: clip(m*F(x) - (s-1), 0, 1).

    On the interior of block ``s`` this equals m * (F(x) - (s-1)/m); it is 0
    left of the block and 1 right of it, and averaging over s = 1..m with
    weight 1/m recovers F(x) exactly (also for laws with atoms).
    """
    _check_block_index(m, s)
    x_arr = _as_float_array(x)
    out = np.clip(m * dist.cdf(x_arr) - (s - 1), 0.0, 1.0)
    return _scalar_or_array(out, x)


def conditional_quantile(dist: Distribution, m: int, s: int, p):
    """Quantile of block ``s``: Q((s + p - 1) / m)."""
    _check_block_index(m, s)
    p_arr = _as_float_array(p)
    if np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
        raise DomainError(f"conditional quantile probability outside [0, 1]: {p!r}")
    out = dist.quantile((s + p_arr - 1.0) / m)
    return _scalar_or_array(out, p)


def _check_block_index(m: int, s: int) -> None:
    if m < 1:
        raise DomainError(f"block count must be >= 1, got {m}")
    if not 1 <= s <= m:
        raise DomainError(f"block index must be in 1..{m}, got {s}")


_BUILDERS = {
    "uniform": (0, lambda p: Uniform01()),
    "normal": (2, lambda p: Normal(p[0], p[1])),
    "beta": (2, lambda p: Beta(p[0], p[1])),
    "gamma": (2, lambda p: Gamma(p[0], p[1])),
}


def distribution_from_name(name: str, params=()) -> Distribution:
    """Build a distribution from a family name and a parameter list.

    ``discrete`` expects params as alternating point/probability pairs
    (x1, p1, x2, p2, ...); the other families take their natural parameters
    in order.
    """
    key = name.strip().lower()
    params = tuple(float(v) for v in params)
    if key == "discrete":
        if len(params) < 2 or len(params) % 2 != 0:
            raise DomainError("discrete params must be x1,p1,x2,p2,... pairs")
        return Discrete(params[0::2], params[1::2])
    if key not in _BUILDERS:
        raise DomainError(
            f"unknown distribution {name!r}; expected one of "
            f"{sorted([*_BUILDERS, 'discrete'])}"
        )
    n_args, build = _BUILDERS[key]
    if len(params) != n_args:
        raise DomainError(f"{key} takes {n_args} parameters, got {len(params)}")
    return build(params)
