"""Ground truth for the waiting-time tail: exact lattice evaluation of the
geometric-mixture series and two Monte Carlo estimators.

The waiting time is a compound geometric sum: W = X_1 + ... + X_N with
P(N = n) = (1-rho) rho^n, n >= 0.  Its tail P(W > x) = sum over n of
(1-rho) rho^n P(S_n > x) is evaluated three ways:

* ``pk_truncated`` -- bracketed enclosure: the model is sandwiched between
  two lattice distributions (mass of ((k-1)h, kh] moved to kh for the upper
  bracket and to (k-1)h for the lower), each evaluated exactly by running
  discrete convolution with an absorbing cap above x, the series truncated at
  N terms with remainder <= rho^{N+1}.  The enclosure is rigorous up to
  ordinary float rounding of the convolution/series accumulation (~1e-15
  relative; no interval arithmetic), so treat the brackets as sharp only to
  that resolution;
* ``crude_mc`` -- plain indicator sampling of W;
* ``ak_estimate`` -- the conditional (max-hiding) estimator with a
  relative-error stopping rule; on lattice models an atom correction keeps it
  exactly unbiased under ties.

The absorbing cap is exact: summands are nonnegative, so once a partial sum
exceeds a cap C > x it can never drop back, and P(S_n > x) is unchanged by
lumping all mass >= C at C.
"""

from dataclasses import dataclass
from enum import Enum
import math
import statistics

import numpy as np

from . import kernels
from .distributions import (
    IntegratedTailModel,
    Lattice,
    QueueModel,
    sample_x,
    tail_prob,
)
from .errors import ResourceBudgetError
from .geom import GeomModel
from .rng import Stream

BATCH_SIZE = 10_000
MIN_SAMPLES_BEFORE_CHECK = 100_000
# convolution budget: product of series length and lattice size
_CELL_BUDGET = 200_000_000


class Method(Enum):
    CRUDE = "crude"
    ASMUSSEN_KROESE = "asmussen-kroese"


@dataclass(frozen=True)
class SimulationEstimate:
    estimate: float
    half_width: float
    rel_err: float
    n_samples: int
    seed: int
    method: Method
    converged: bool = True


@dataclass(frozen=True)
class PkExact:
    value: float
    truncation_n: int
    truncation_bound: float
    lattice_spacing: float
    lower: float
    upper: float


def _z_value(confidence: float) -> float:
    if not 0 < confidence < 1:
        raise ValueError(f"confidence must lie in (0,1), got {confidence}")
    return statistics.NormalDist().inv_cdf(0.5 * (1.0 + confidence))


def _cap_index(x: float, h: float) -> int:
    """Smallest m with m*h > x (float-robust)."""
    m = int(math.floor(x / h)) + 1
    while m > 0 and (m - 1) * h > x:
        m -= 1
    while m * h <= x:
        m += 1
    return m


def lattice_brackets(model: IntegratedTailModel, h: float, cap: float):
    """Sandwich a model between two lattice laws with spacing h: the upper
    law rounds X up to the lattice, the lower rounds down; mass beyond
    ``cap`` is lumped at the top point."""
    if isinstance(model, Lattice):
        raise ValueError("model is already a lattice")
    if not h > 0:
        raise ValueError(f"spacing must be positive, got {h}")
    m = _cap_index(cap, h)
    tails = np.array([tail_prob(model, k * h) for k in range(m + 1)])
    upper = np.zeros(m + 1)
    upper[1:m] = tails[0 : m - 1] - tails[1:m]
    upper[m] = tails[m - 1]
    lower = np.zeros(m + 1)
    lower[0:m] = tails[0:m] - tails[1 : m + 1]
    lower[m] = tails[m]
    return Lattice(h=h, mass=lower), Lattice(h=h, mass=upper)


def _capped_pmf(mass: np.ndarray, m: int) -> np.ndarray:
    if mass.size <= m + 1:
        out = np.zeros(m + 1)
        out[: mass.size] = mass
        return out
    out = mass[: m + 1].copy()
    out[m] += mass[m + 1 :].sum()
    return out


def convolve_tail_grid(dist: Lattice, n: int, xs) -> np.ndarray:
    """Exact P(S_n > x) for every x in xs by one iterated convolution with an
    absorbing cap above max(xs)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if n * dist.mass.size > _CELL_BUDGET:
        raise ResourceBudgetError(
            f"convolution needs {n * dist.mass.size} lattice cells, "
            f"budget is {_CELL_BUDGET}"
        )
    x_max = float(xs.max())
    if x_max < 0:
        return np.ones_like(xs)
    m = _cap_index(x_max, dist.h)
    pmf = _capped_pmf(dist.mass, m)
    cur = pmf.copy()
    for _ in range(n - 1):
        cur = np.convolve(cur, pmf)
        if cur.size > m + 1:
            cur[m] += cur[m + 1 :].sum()
            cur = cur[: m + 1]
    suffix = np.concatenate([np.cumsum(cur[::-1])[::-1], [0.0]])
    out = np.empty(xs.size)
    for i, x in enumerate(xs):
        if x < 0:
            out[i] = 1.0
        else:
            k = _cap_index(float(x), dist.h)
            out[i] = suffix[min(k, m)]
    return out


def convolve_tail(dist: Lattice, n: int, x) -> float:
    """Exact P(S_n > x) by iterated discrete convolution."""
    return float(convolve_tail_grid(dist, n, [x])[0])


def _pk_series(pmf: np.ndarray, m: int, rho: float, n_terms: int) -> float:
    """sum_{n=1}^{N} (1-rho) rho^n P(S_n > x) where index m is the absorbing
    cap (all mass there is > x)."""
    acc = 0.0
    weight = (1.0 - rho) * rho
    cur = pmf.copy()
    for n in range(1, n_terms + 1):
        acc += weight * cur[m]
        weight *= rho
        if n < n_terms:
            cur = np.convolve(cur, pmf)
            cur[m] += cur[m + 1 :].sum()
            cur = cur[: m + 1]
    return acc


def pk_truncated(q: QueueModel, x, tol: float = 1e-10, h: float = 0.05) -> PkExact:
    """Bracketed evaluation of P(W > x); ``value`` is the bracket midpoint,
    ``lower``/``upper`` the rigorous enclosure (upper includes the series
    remainder rho^{N+1})."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    rho = q.rho
    n_terms = math.ceil(math.log(tol) / math.log(rho))
    bound = rho ** (n_terms + 1)
    if isinstance(q.model, Lattice):
        h = q.model.h
        m = _cap_index(x, h)
        if n_terms * (m + 1) > _CELL_BUDGET:
            raise ResourceBudgetError(
                f"series needs {n_terms * (m + 1)} lattice cells, "
                f"budget is {_CELL_BUDGET}"
            )
        pmf = _capped_pmf(q.model.mass, m)
        lo = _pk_series(pmf, m, rho, n_terms)
        up = lo + bound
    else:
        m = _cap_index(x, h)
        if n_terms * (m + 1) > _CELL_BUDGET:
            raise ResourceBudgetError(
                f"series needs {n_terms * (m + 1)} lattice cells, "
                f"budget is {_CELL_BUDGET}"
            )
        lat_lo, lat_up = lattice_brackets(q.model, h, x)
        lo = _pk_series(lat_lo.mass, m, rho, n_terms)
        up = _pk_series(lat_up.mass, m, rho, n_terms) + bound
    return PkExact(
        value=0.5 * (lo + up),
        truncation_n=n_terms,
        truncation_bound=bound,
        lattice_spacing=h,
        lower=lo,
        upper=up,
    )


def compound_geometric_sample(q: QueueModel, stream: Stream) -> float:
    """One exact draw of W from its compound-geometric representation."""
    u0 = stream.next_uniform()
    n = int(math.floor(math.log(u0) / math.log(q.rho)))
    total = 0.0
    for _ in range(n):
        total += sample_x(q.model, stream.next_uniform())
    return total


def _batched(total: int):
    done = 0
    while done < total:
        nb = min(BATCH_SIZE, total - done)
        yield done, nb
        done += nb


def crude_mc(q: QueueModel, x, n_samples: int, seed: int = 0) -> SimulationEstimate:
    if n_samples < 100:
        raise ValueError(f"need at least 100 samples, got {n_samples}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    hits = 0.0
    for rep0, nb in _batched(n_samples):
        b1, _ = kernels.crude_batch(q.model, q.rho, x, seed, rep0, nb)
        hits += b1
    est = hits / n_samples
    var = est * (1.0 - est)
    half = _z_value(0.99) * math.sqrt(var / n_samples)
    rel = half / est if est > 0 else math.inf
    return SimulationEstimate(
        estimate=est,
        half_width=half,
        rel_err=rel,
        n_samples=n_samples,
        seed=seed,
        method=Method.CRUDE,
    )


def geom_crude_mc(g: GeomModel, x, n_samples: int, seed: int = 0) -> SimulationEstimate:
    """Crude sampling of the geometric sum with count >= 1 (same kernels as
    the queue-side estimator, count offset by one)."""
    if n_samples < 100:
        raise ValueError(f"need at least 100 samples, got {n_samples}")
    hits = 0.0
    for rep0, nb in _batched(n_samples):
        b1, _ = kernels.crude_batch(
            g.y_model, 1.0 - g.p, x, seed, rep0, nb, n_offset=1
        )
        hits += b1
    est = hits / n_samples
    var = est * (1.0 - est)
    half = _z_value(0.99) * math.sqrt(var / n_samples)
    rel = half / est if est > 0 else math.inf
    return SimulationEstimate(
        estimate=est,
        half_width=half,
        rel_err=rel,
        n_samples=n_samples,
        seed=seed,
        method=Method.CRUDE,
    )


def ak_estimate(
    q: QueueModel,
    x,
    target_rel_err: float = 0.05,
    confidence: float = 0.99,
    seed: int = 0,
    max_samples: int = 50_000_000,
) -> SimulationEstimate:
    """Conditional-estimator run with a relative-error stopping rule: batches
    of 10^4 replications, first convergence check after 10^5, stop when the
    CI half-width at the given confidence is within target_rel_err of the
    estimate, or flag non-convergence at max_samples."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if not target_rel_err > 0:
        raise ValueError(f"target_rel_err must be positive, got {target_rel_err}")
    z = _z_value(confidence)
    s1 = 0.0
    s2 = 0.0
    n = 0
    converged = False
    while n < max_samples:
        nb = min(BATCH_SIZE, max_samples - n)
        b1, b2 = kernels.ak_batch(q.model, q.rho, x, seed, n, nb)
        s1 += b1
        s2 += b2
        n += nb
        if n >= MIN_SAMPLES_BEFORE_CHECK:
            mean = s1 / n
            if mean > 0.0:
                var = max(0.0, (s2 - s1 * s1 / n) / (n - 1))
                half = z * math.sqrt(var / n)
                if half <= target_rel_err * mean:
                    converged = True
                    break
    mean = s1 / n
    var = max(0.0, (s2 - s1 * s1 / n) / (n - 1))
    half = z * math.sqrt(var / n)
    rel = half / mean if mean > 0 else math.inf
    return SimulationEstimate(
        estimate=mean,
        half_width=half,
        rel_err=rel,
        n_samples=n,
        seed=seed,
        method=Method.ASMUSSEN_KROESE,
        converged=converged,
    )
