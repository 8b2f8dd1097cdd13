"""Closed-form tail approximations for the stationary waiting time.

Let W be the steady-state waiting time of an M/G/1 queue at load rho whose
integrated-tail law X has mean mu and tail F̄.  The approximations here:

* heavy_traffic:  exp(-(1-rho) x / mu), the exponential limit;
* heavy_tail:     (rho/(1-rho)) F̄(x), the single-big-jump asymptote;
* s_sum / h_approx:  the finite correction  S(rho,x) + rho^{x/mu}  with
  S = sum_{n=1}^{M(x)} (1-rho) rho^n n F̄(x-(n-1)mu),
  M(x) = floor((x - x^beta)/mu), beta = 1/min(2, alpha-1);
* gamma_factor / j_approx:  the compact variant
  (rho/(1-rho)) gamma(x) F̄(x) + rho^{x/mu}  with
  gamma = 1 - rho^{x/mu}(1 + (1-rho)x/mu), provably in [0,1);
* t_tail / h_clt:  the normal-refined geometric term
  T(rho,x) = sum_{n>=1} (1-rho) rho^n (1 - Phi((x-n mu)/(sigma sqrt(n))))
  replacing rho^{x/mu}; t_tail_z evaluates the same quantity as a normal
  expectation E[rho^{floor(t(Z)^2)+1}] by deterministic quadrature;
* subexp_sum_approx:  the n-fold convolution surrogate n F̄(x-(n-1)mu).
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import ndtri

from .distributions import (
    ExponentialIntegrated,
    IntegratedTailModel,
    ParetoIntegratedTail,
    QueueModel,
    mean_integrated,
    tail_prob,
    variance_integrated,
)
from .errors import UnsupportedModelError

# terms below this magnitude are skipped so summation order quirks at the
# subnormal boundary cannot leak into results
_TERM_FLOOR = 1e-300
_SERIES_TOL = 1e-12


@dataclass(frozen=True)
class ApproximationPoint:
    x: float
    heavy_traffic: float
    heavy_tail: float
    h: float
    j: float
    h_clt: float | None
    geometric_term: float
    m_of_x: int


def heavy_traffic(q: QueueModel, x) -> float:
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    mu = mean_integrated(q.model)
    return math.exp(-(1.0 - q.rho) * x / mu)


def heavy_tail(q: QueueModel, x) -> float:
    """Raw asymptote; may exceed 1 at small x (reported unclamped)."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return q.rho / (1.0 - q.rho) * tail_prob(q.model, x)


def _beta_exponent(model: IntegratedTailModel) -> float:
    if isinstance(model, ParetoIntegratedTail):
        return 1.0 / min(2.0, model.alpha - 1.0)
    # light-tailed variants behave like alpha = infinity
    return 0.5


def big_m(q: QueueModel, x) -> int:
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    beta = _beta_exponent(q.model)
    mu = mean_integrated(q.model)
    if x == 0.0:
        return 0
    return max(0, math.floor((x - x**beta) / mu))


def s_sum(q: QueueModel, x) -> float:
    """Compensated ascending sum of (1-rho) rho^n n F̄(x-(n-1)mu)."""
    m = big_m(q, x)
    mu = mean_integrated(q.model)
    rho = q.rho
    total = 0.0
    comp = 0.0
    weight = (1.0 - rho) * rho  # (1-rho) rho^n at n=1
    for n in range(1, m + 1):
        term = weight * n * tail_prob(q.model, x - (n - 1) * mu)
        weight *= rho
        if term < _TERM_FLOOR:
            continue
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def geometric_term(q: QueueModel, x) -> float:
    mu = mean_integrated(q.model)
    return q.rho ** (x / mu)


def h_approx(q: QueueModel, x) -> float:
    return s_sum(q, x) + geometric_term(q, x)


def gamma_factor(q: QueueModel, x) -> float:
    """1 - rho^{x/mu}(1 + (1-rho)x/mu); lies in [0,1) since with
    t = (1-rho)x/mu one has rho^{x/mu} <= e^{-t} and e^{-t}(1+t) <= 1."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    mu = mean_integrated(q.model)
    g = q.rho ** (x / mu)
    # keep the half-open range when the complement underflows past 1 ulp
    return min(1.0 - g - g * (1.0 - q.rho) * x / mu, math.nextafter(1.0, 0.0))


def j_approx(q: QueueModel, x) -> float:
    g = gamma_factor(q, x)
    return q.rho / (1.0 - q.rho) * g * tail_prob(q.model, x) + geometric_term(q, x)


def _sigma(q: QueueModel) -> float:
    var = variance_integrated(q.model)
    if math.isinf(var):
        raise UnsupportedModelError(
            "infinite-variance model: the normal-refined term is undefined "
            "(its stable-law counterpart is out of scope)"
        )
    return math.sqrt(var)


def _phi_tail(u: float) -> float:
    """1 - Phi(u) for scalar u."""
    return 0.5 * math.erfc(u / math.sqrt(2.0))


def t_tail(q: QueueModel, x, _tol=_SERIES_TOL) -> float:
    """Series form, truncated at the smallest N with rho^{N+1} < tol (each
    remaining term is at most (1-rho) rho^n)."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    sigma = _sigma(q)
    mu = mean_integrated(q.model)
    rho = q.rho
    n_max = math.ceil(math.log(_tol) / math.log(rho))
    total = 0.0
    comp = 0.0
    weight = (1.0 - rho) * rho
    for n in range(1, n_max + 1):
        z = (x - n * mu) / (sigma * math.sqrt(n))
        term = weight * _phi_tail(z)
        weight *= rho
        if term < _TERM_FLOOR:
            continue
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


# midpoint rule in the probability domain: u_i = (i+0.5)/K, z_i = Phi^{-1}(u_i),
# nodes with |z| > 10 dropped (their total mass is below 1e-23)
_QUAD_NODES = 2_000_001


def t_tail_z(q: QueueModel, x) -> float:
    """Normal-expectation form E[rho^{floor(t(Z)^2)+1}] with
    t(z) = sqrt(x/mu + (sigma z/(2 mu))^2) - sigma z/(2 mu); equals the series
    exactly (Abel summation over P(floor(t(Z)^2) >= n) = Phi((x-n mu)/(sigma
    sqrt(n)))), so the two implementations cross-check each other."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    sigma = _sigma(q)
    mu = mean_integrated(q.model)
    rho = q.rho
    u = (np.arange(_QUAD_NODES) + 0.5) / _QUAD_NODES
    z = ndtri(u)
    z = z[np.abs(z) <= 10.0]
    a = sigma / (2.0 * mu)
    t = np.sqrt(x / mu + (a * z) ** 2) - a * z
    expo = np.floor(t * t) + 1.0
    log_rho = math.log(rho)
    vals = np.exp(np.maximum(expo * log_rho, -745.0))
    vals[expo * log_rho < -745.0] = 0.0
    return float(vals.sum() / _QUAD_NODES)


def h_clt(q: QueueModel, x) -> float:
    return s_sum(q, x) + t_tail(q, x)


def subexp_sum_approx(model: IntegratedTailModel, n: int, x) -> float:
    """n F̄(max(0, x-(n-1)mu)), the one-big-jump surrogate for P(S_n > x)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    mu = mean_integrated(model)
    return n * tail_prob(model, max(0.0, x - (n - 1) * mu))


def approximation_point(q: QueueModel, x) -> ApproximationPoint:
    """Bundle of every closed-form value at one x (CLT column only when the
    variance is finite)."""
    try:
        clt = h_clt(q, x)
    except UnsupportedModelError:
        clt = None
    return ApproximationPoint(
        x=float(x),
        heavy_traffic=heavy_traffic(q, x),
        heavy_tail=heavy_tail(q, x),
        h=h_approx(q, x),
        j=j_approx(q, x),
        h_clt=clt,
        geometric_term=geometric_term(q, x),
        m_of_x=big_m(q, x),
    )
