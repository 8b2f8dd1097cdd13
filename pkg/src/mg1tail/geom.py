"""Tails of geometric random sums Z = Y_1 + ... + Y_N, where
P(N = k) = p (1-p)^{k-1} for k >= 1 and the summands have a power tail.

With the mapping rho = 1-p and X = Y this is algebraically the same object as
the queueing approximations (the queue-side count starts at 0, which only
contributes a factor 1-p), so geom_tail_approx mirrors j_approx exactly; the
test suite locks the two implementations together at 1e-12.
"""

from dataclasses import dataclass, field
import math

from .distributions import IntegratedTailModel, mean_integrated, tail_index, tail_prob


@dataclass(frozen=True)
class GeomModel:
    y_model: IntegratedTailModel
    p: float
    tau: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie strictly in (0,1), got {self.p}")
        beta = tail_index(self.y_model)  # rejects variants without one
        if not beta > 2:
            raise ValueError(f"summand tail index must exceed 2, got {beta}")
        object.__setattr__(
            self, "tau", (beta - 1.0) * mean_integrated(self.y_model)
        )


def geom_gamma(g: GeomModel, x) -> float:
    """1 - (1-p)^{x/mu} (1 + p x/mu) with mu the summand mean; in [0,1)."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    mu = mean_integrated(g.y_model)
    base = (1.0 - g.p) ** (x / mu)
    # keep the half-open range when the complement underflows past 1 ulp
    return min(1.0 - base - base * g.p * x / mu, math.nextafter(1.0, 0.0))


def geom_tail_approx(g: GeomModel, x) -> float:
    """((1-p)/p) gamma(x) P(Y > x) + (1-p)^{x/mu}."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    mu = mean_integrated(g.y_model)
    base = (1.0 - g.p) ** (x / mu)
    return (1.0 - g.p) / g.p * geom_gamma(g, x) * tail_prob(g.y_model, x) + base


def geom_threshold(g: GeomModel, c: float = 1.0) -> float:
    """y(p) = c tau p^{-1} log(1/p), the scale where the exponential and
    power contributions change places."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    return c * g.tau / g.p * math.log(1.0 / g.p)
