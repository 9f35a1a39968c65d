"""Closed-form values for almost-attainment distances and their bounds.

All functions are pure IEEE evaluations of explicit formulas: the sharp
upper-bound function ``psi`` for the refined modulus, its lower bound, the
auxiliary pair (k, eta) appearing in the sharp-bound construction, the exact
distance on the real line, the exact Hilbert-space distance to the
norm-attainment diagonal with the refined modulus it yields, and the
improved spherical-modulus bound for uniformly non-square spaces.

Regime conventions for a query (mu, theta, delta):

* ``regime_psi``:  mu * theta > 1 - delta        (sharp bound applies)
* ``regime_eq``:   mu * theta = 1 - delta        (modulus equals the lower bound)
* ``regime_sum``:  delta < 1 and 1 - delta < mu * theta <= 2 * (1 - delta)
                   (direct-sum witness constructions apply)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "RegimeError",
    "ModulusQuery",
    "HilbertPair",
    "LowerBound",
    "psi",
    "phi_upper_bound",
    "phi_lower_bound",
    "k_eta_auxiliaries",
    "real_line_distance",
    "hilbert_distance",
    "hilbert_modulus",
    "nonsquare_phi_bound",
    "ALPHA_CEILING",
]

# Universal ceiling for the non-squareness parameter.
ALPHA_CEILING = 2.0 - math.sqrt(2.0)

# Floating-point equality window for regime boundaries and radicand snaps.
_EQ_TOL = 1e-12


class RegimeError(ValueError):
    """Query parameters violate the validity regime of a formula."""


def _guarded_sqrt(radicand: float, scale: float = 1.0) -> float:
    """sqrt with tiny negative radicands snapped to zero.

    Regime boundaries produce radicands like -1e-17 in IEEE arithmetic;
    anything more negative than the snap window is a genuine regime error.
    """
    if radicand < 0.0:
        if radicand < -_EQ_TOL * max(scale, 1.0):
            raise RegimeError(f"negative radicand {radicand}")
        return 0.0
    return math.sqrt(radicand)


@dataclass(frozen=True)
class ModulusQuery:
    """Parameters (mu, theta, delta) with computed validity regimes."""

    mu: float
    theta: float
    delta: float

    def __post_init__(self):
        if not (0.0 <= self.mu <= 1.0):
            raise RegimeError(f"mu must be in [0, 1], got {self.mu}")
        if not (0.0 <= self.theta <= 1.0):
            raise RegimeError(f"theta must be in [0, 1], got {self.theta}")
        if not (0.0 < self.delta < 2.0):
            raise RegimeError(f"delta must be in (0, 2), got {self.delta}")

    @property
    def slack(self) -> float:
        """mu * theta - (1 - delta); nonnegative on the admissible set."""
        return self.mu * self.theta - (1.0 - self.delta)

    @property
    def regime_psi(self) -> bool:
        return self.slack > 0.0

    @property
    def regime_eq(self) -> bool:
        return abs(self.slack) <= _EQ_TOL

    @property
    def regime_sum(self) -> bool:
        return (self.delta < 1.0 and self.slack > 0.0
                and self.mu * self.theta <= 2.0 * (1.0 - self.delta))

    def require_psi(self):
        if not self.regime_psi:
            raise RegimeError(
                f"mu*theta > 1-delta required, got {self.mu}*{self.theta} "
                f"<= {1.0 - self.delta}")

    def require_admissible(self):
        if self.slack < -_EQ_TOL:
            raise RegimeError(
                f"mu*theta >= 1-delta required, got slack {self.slack}")


class LowerBound(NamedTuple):
    value: float
    exact: bool  # True on the boundary regime mu*theta = 1-delta


def psi(q: ModulusQuery) -> float:
    """Sharp upper-bound function for the refined modulus.

    psi(mu, theta, delta) =
        (2 - mu - theta + sqrt((mu-theta)^2 + 8(mu theta - 1 + delta))) / 2
    """
    q.require_psi()
    rad = (q.mu - q.theta) ** 2 + 8.0 * q.slack
    # grouping mu + theta keeps the evaluation exact under argument swap
    return (2.0 - (q.mu + q.theta) + _guarded_sqrt(rad)) / 2.0


def phi_upper_bound(q: ModulusQuery) -> float:
    """min{psi, 1 + mu, 1 + theta}: valid for every space on regime_psi."""
    return min(psi(q), 1.0 + q.mu, 1.0 + q.theta)


def phi_lower_bound(q: ModulusQuery) -> LowerBound:
    """Universal lower bound 1 - min(mu, theta).

    The ``exact`` flag marks the boundary regime mu*theta = 1-delta, where
    the refined modulus equals this bound in every space.
    """
    q.require_admissible()
    return LowerBound(1.0 - min(q.mu, q.theta), q.regime_eq)


def k_eta_auxiliaries(q: ModulusQuery) -> tuple[float, float]:
    """Auxiliary pair (k, eta) of the sharp-bound construction.

    k   = (theta - mu + sqrt((mu-theta)^2 + 8(mu theta - 1 + delta))) / (4 theta)
    eta = (mu theta - 1 + delta) / theta

    Satisfies k in (0, 1) and eta/k + 1 - mu = 2 k theta + 1 - theta = psi.
    """
    q.require_psi()
    if q.theta <= 0.0:
        raise RegimeError("theta must be positive")
    if not (q.delta < min(1.0 + q.mu ** 2, 1.0 + q.theta ** 2)):
        raise RegimeError("delta must be below min(1 + mu^2, 1 + theta^2)")
    root = _guarded_sqrt((q.mu - q.theta) ** 2 + 8.0 * q.slack)
    k = (q.theta - q.mu + root) / (4.0 * q.theta)
    eta = q.slack / q.theta
    return k, eta


def real_line_distance(x: float, f: float) -> float:
    """Exact distance of a scalar pair to {(1, 1), (-1, -1)}."""
    if abs(x) > 1.0 + _EQ_TOL or abs(f) > 1.0 + _EQ_TOL:
        raise RegimeError("both scalars must lie in [-1, 1]")
    return min(max(abs(x - 1.0), abs(f - 1.0)),
               max(abs(x + 1.0), abs(f + 1.0)))


@dataclass(frozen=True)
class HilbertPair:
    """A point pair in a euclidean ball, ordered so that |x| >= |y|.

    The second component doubles as a functional through the inner product,
    so a pair here is a point-functional pair of the euclidean space.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal dimension")
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        if max(nx, ny) > 1.0 + 1e-9:
            raise RegimeError("both points must lie in the unit ball")
        if nx < ny:
            x, y = y, x
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def norms(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.x)), float(np.linalg.norm(self.y))


def hilbert_distance(pair: HilbertPair) -> float:
    """Exact euclidean distance of a ball pair to the diagonal of spheres.

    With a = |x|, b = |y|, s = <x, y> and |x| >= |y|:

        1 - b                                   if s >= b^2 + b (a^2 - b^2) / 2
        sqrt(1 - s - 2 lam sqrt(a^2 b^2 - s^2)) otherwise,

    where lam is the smaller-modulus root placing the equidistant sphere
    point; the displayed root is used directly, never re-solved.  The value
    for coincident points is |1 - a| (1 at the origin), the limit of the
    first branch.
    """
    a, b = pair.norms
    s = float(np.dot(pair.x, pair.y))
    d2 = a * a + b * b - 2.0 * s  # |x - y|^2
    if d2 <= _EQ_TOL:
        return 1.0 - a if a <= 1.0 else a - 1.0
    if s >= b * b + b * (a * a - b * b) / 2.0 - _EQ_TOL:
        return 1.0 - b
    cross = _guarded_sqrt(a * a * b * b - s * s)
    lam_rad = 4.0 * d2 - (a * a - b * b) ** 2
    lam = (-2.0 * cross + _guarded_sqrt(lam_rad)) / (2.0 * d2)
    return _guarded_sqrt(1.0 - s - 2.0 * lam * cross)


def hilbert_modulus(q: ModulusQuery) -> float:
    """Refined modulus of a euclidean space of dimension >= 2.

    Requires mu >= theta.  Piecewise:

        1 - theta                    if 1 - delta >= theta^2 + theta (mu^2 - theta^2) / 2
        max{1 - theta, sqrt(delta' - 2 lam sqrt(mu^2 theta^2 - (1-delta')^2))}
                                     otherwise,

    with lam the displayed smaller-modulus root.  Outside 1-delta in
    [-mu*theta, mu*theta] the alignment constraint saturates, so delta is
    clamped to that range (below it only maximally aligned pairs qualify,
    beyond it every pair does).
    """
    if q.mu < q.theta:
        raise RegimeError("mu >= theta required (swap the arguments)")
    mu, th = q.mu, q.theta
    delta = min(max(q.delta, 1.0 - mu * th), 1.0 + mu * th)
    if 1.0 - delta >= th * th + th * (mu * mu - th * th) / 2.0 - _EQ_TOL:
        return 1.0 - th
    cross = _guarded_sqrt(mu * mu * th * th - (1.0 - delta) ** 2)
    den = 2.0 * (mu * mu + th * th - 2.0 + 2.0 * delta)
    lam_rad = 4.0 * (mu * mu + th * th - 2.0 + 2.0 * delta) - (mu * mu - th * th) ** 2
    lam = (-2.0 * cross + _guarded_sqrt(lam_rad)) / den
    return max(1.0 - th, _guarded_sqrt(delta - 2.0 * lam * cross))


def nonsquare_phi_bound(delta: float, alpha_tilde: float) -> float:
    """Spherical-modulus bound for spaces with non-squareness above alpha_tilde.

        sqrt(2 delta) sqrt(1 - alpha_tilde / 3)   for delta < 1/2 - alpha_tilde / 6
        2 delta                                   for delta > 1/2 - alpha_tilde / 6

    At the breakpoint the smaller of the two branches is returned.  The
    ceiling check allows a 2e-4 window so that decimal roundings of
    2 - sqrt(2) (e.g. 0.5858) remain usable.
    """
    if not (0.0 < alpha_tilde <= ALPHA_CEILING + 2e-4):
        raise RegimeError(f"alpha_tilde must be in (0, {ALPHA_CEILING:.6f}]")
    if not (0.0 < delta < 0.5):
        raise RegimeError("delta must be in (0, 1/2)")
    breakpoint_ = 0.5 - alpha_tilde / 6.0
    sharp = math.sqrt(2.0 * delta) * math.sqrt(1.0 - alpha_tilde / 3.0)
    if abs(delta - breakpoint_) <= _EQ_TOL:
        return min(sharp, 2.0 * delta)
    return sharp if delta < breakpoint_ else 2.0 * delta
