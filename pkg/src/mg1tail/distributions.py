"""Service-related distribution models.

The central object is the integrated-tail distribution of the service time:
the stationary-excess law whose density is P(V > t)/EV.  All waiting-time
formulas downstream consume only this law's tail, mean, and variance.

Variants:

* ``ParetoIntegratedTail(alpha)`` -- P(X > x) = 1 for x < 1 and x^{-(alpha-1)}
  for x >= 1, alpha > 2.  Specifies the integrated tail directly; the
  underlying service moments are not identified by it, so service-level
  accessors reject this variant.
* ``ExponentialIntegrated(rate)`` -- tail e^{-rate*x}; the integrated tail of
  an exponential service time is exponential with the same rate, which makes
  this the M/M/1 sanity model with closed-form answers.
* ``Lattice(h, mass)`` -- probability mass[j] on the point j*h.  Exists so
  convolution oracles and estimator-unbiasedness tests have exactly
  enumerable ground truth.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import UnsupportedModelError


@dataclass(frozen=True)
class ParetoIntegratedTail:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 2:
            raise ValueError(f"alpha must exceed 2, got {self.alpha}")


@dataclass(frozen=True)
class ExponentialIntegrated:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")


class Lattice:
    """Mass vector over the points {0, h, 2h, ...}. Immutable after init."""

    def __init__(self, h: float, mass):
        if not h > 0:
            raise ValueError(f"spacing must be positive, got {h}")
        m = np.asarray(mass, dtype=np.float64)
        if m.ndim != 1 or m.size == 0:
            raise ValueError("mass must be a nonempty 1-d vector")
        if np.any(m < 0):
            raise ValueError("mass entries must be nonnegative")
        if abs(float(m.sum()) - 1.0) > 1e-12:
            raise ValueError(f"mass must sum to 1 within 1e-12, got {m.sum()!r}")
        self.h = float(h)
        self.mass = m.copy()
        self.mass.setflags(write=False)
        # suffix[j] = P(X >= j*h); one extra 0 so suffix[len] is valid
        self.suffix = np.concatenate([np.cumsum(m[::-1])[::-1], [0.0]])
        self.suffix.setflags(write=False)
        self.support = np.arange(m.size) * self.h
        self.support.setflags(write=False)

    def __repr__(self):
        return f"Lattice(h={self.h}, points={self.mass.size})"

    def __eq__(self, other):
        return (
            isinstance(other, Lattice)
            and self.h == other.h
            and np.array_equal(self.mass, other.mass)
        )

    def __hash__(self):
        return hash((self.h, self.mass.tobytes()))


IntegratedTailModel = ParetoIntegratedTail | ExponentialIntegrated | Lattice


@dataclass(frozen=True)
class ServiceMoments:
    """Raw moments of the underlying service time V."""

    ev1: float
    ev2: float
    ev3: float | None = None


@dataclass(frozen=True)
class QueueModel:
    model: IntegratedTailModel
    rho: float

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie strictly in (0,1), got {self.rho}")


def tail_prob(model: IntegratedTailModel, x) -> float:
    """P(X > x) for the integrated-tail variable."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if isinstance(model, ParetoIntegratedTail):
        if x < 1.0:
            return 1.0
        return x ** (-(model.alpha - 1.0))
    if isinstance(model, ExponentialIntegrated):
        return math.exp(-model.rate * x)
    # lattice: mass strictly above x
    idx = int(np.searchsorted(model.support, x, side="right"))
    return float(model.suffix[idx])


def atom_prob(model: IntegratedTailModel, v: float) -> float:
    """P(X = v); zero for the atomless variants."""
    if not isinstance(model, Lattice):
        return 0.0
    j = int(round(v / model.h))
    if 0 <= j < model.mass.size and model.support[j] == v:
        return float(model.mass[j])
    return 0.0


def mean_integrated(model: IntegratedTailModel) -> float:
    if isinstance(model, ParetoIntegratedTail):
        a = model.alpha
        return (a - 1.0) / (a - 2.0)
    if isinstance(model, ExponentialIntegrated):
        return 1.0 / model.rate
    return float(np.sum(model.support * model.mass))


def variance_integrated(model: IntegratedTailModel) -> float:
    """Var(X); math.inf marks the infinite-variance regime (2 < alpha <= 3)."""
    if isinstance(model, ParetoIntegratedTail):
        a = model.alpha
        if a <= 3.0:
            return math.inf
        ex2 = (a - 1.0) / (a - 3.0)
        m = (a - 1.0) / (a - 2.0)
        return ex2 - m * m
    if isinstance(model, ExponentialIntegrated):
        return 1.0 / (model.rate * model.rate)
    m = mean_integrated(model)
    return float(np.sum((model.support - m) ** 2 * model.mass))


def sample_x(model: IntegratedTailModel, u: float) -> float:
    """The u-quantile of X; u near 1 probes the right tail."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0,1), got {u}")
    if isinstance(model, ParetoIntegratedTail):
        return (1.0 - u) ** (-1.0 / (model.alpha - 1.0))
    if isinstance(model, ExponentialIntegrated):
        return -math.log1p(-u) / model.rate
    cum = 1.0 - model.suffix[1:]  # cum[j] = P(X <= j*h)
    idx = int(np.searchsorted(cum, u, side="right"))
    idx = min(idx, model.mass.size - 1)
    return float(model.support[idx])


def service_moments(model: IntegratedTailModel) -> ServiceMoments:
    """Moments of the service time V itself (only identified for the
    exponential variant: V ~ Exp(rate))."""
    if isinstance(model, ExponentialIntegrated):
        r = model.rate
        return ServiceMoments(ev1=1.0 / r, ev2=2.0 / r**2, ev3=6.0 / r**3)
    raise UnsupportedModelError(
        "service-time moments are only identified for the exponential variant"
    )


def tail_index(model: IntegratedTailModel) -> float:
    """The power alpha-1 governing the integrated tail; errors otherwise."""
    if isinstance(model, ParetoIntegratedTail):
        return model.alpha - 1.0
    raise UnsupportedModelError("model has no regularly varying tail index")


def parse_model(text: str) -> IntegratedTailModel:
    """Parse a model literal: pareto-it:alpha=3.5 | exp:rate=1.0 |
    lattice:file=PATH."""
    kind, _, rest = text.partition(":")
    params = {}
    for piece in filter(None, rest.split(",")):
        key, _, val = piece.partition("=")
        if not val:
            raise ValueError(f"malformed model parameter {piece!r} in {text!r}")
        params[key.strip()] = val.strip()
    if kind == "pareto-it":
        try:
            return ParetoIntegratedTail(alpha=float(params["alpha"]))
        except KeyError:
            raise ValueError(f"pareto-it needs alpha=..., got {text!r}") from None
    if kind == "exp":
        try:
            return ExponentialIntegrated(rate=float(params["rate"]))
        except KeyError:
            raise ValueError(f"exp needs rate=..., got {text!r}") from None
    if kind == "lattice":
        try:
            return load_lattice_file(params["file"])
        except KeyError:
            raise ValueError(f"lattice needs file=PATH, got {text!r}") from None
    raise ValueError(f"unknown model kind {kind!r} in {text!r}")


def load_lattice_file(path: str) -> Lattice:
    """Two-column text file: support point and mass per line.  The spacing is
    inferred as an approximate common divisor of the support points."""
    pts = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split()
            if len(cols) != 2:
                raise ValueError(f"{path}:{line_no}: expected two columns")
            pts.append((float(cols[0]), float(cols[1])))
    if not pts:
        raise ValueError(f"{path}: no data rows")
    support = np.array([p[0] for p in pts])
    mass = np.array([p[1] for p in pts])
    if np.any(support < 0):
        raise ValueError(f"{path}: support points must be nonnegative")
    h = _infer_spacing(support)
    size = int(round(support.max() / h)) + 1
    full = np.zeros(size)
    for s, m in zip(support, mass):
        j = int(round(s / h))
        if abs(j * h - s) > 1e-9 * max(1.0, abs(s)):
            raise ValueError(f"{path}: point {s} is not on the inferred lattice h={h}")
        full[j] += m
    total = full.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{path}: masses sum to {total}, expected 1")
    full /= total  # remove benign parse-level rounding before the 1e-12 gate
    return Lattice(h=h, mass=full)


def _infer_spacing(support: np.ndarray) -> float:
    """Approximate positive float GCD of the nonzero support points."""
    vals = [float(v) for v in support if v > 0]
    if not vals:
        raise ValueError("lattice support has no positive points")
    g = vals[0]
    for v in vals[1:]:
        a, b = max(g, v), min(g, v)
        while b > 1e-9 * vals[0]:
            a, b = b, a - math.floor(a / b + 1e-12) * b
        g = a
    return g
