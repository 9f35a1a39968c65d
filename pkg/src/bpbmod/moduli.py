"""Grid estimators: refined moduli, non-squareness, convexity, and the corrector.

All estimators are pure map-reduce sweeps over deterministic sample sets:
identical configs produce identical results for any chunking, with argmax
ties broken by lowest sample index.  Every estimate carries a conservative
mesh-error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_forms import ALPHA_CEILING, ModulusQuery, RegimeError
from .pi_set import (EmptyConstraintError, ModulusEstimate, PairState, PiWitness,
                     _cached_pi_sample, _golden_min, _sup_over_pairs, hausdorff_modulus_set)
from .spaces import (EstimatorConfig, NormedSpace, SpaceError, mesh_gap,
                     sphere_sample, sphere_sample_angles)

__all__ = [
    "AlphaReport",
    "ConvexityReport",
    "CorrectorResult",
    "CorrectorSearchError",
    "estimate_phi_mut",
    "estimate_phi",
    "estimate_alpha",
    "audit_alpha_interior",
    "estimate_convexity_modulus",
    "convexity_profile",
    "check_alpha_self_dual",
    "bpb_corrector",
    "collapse_k",
]


@dataclass(frozen=True)
class AlphaReport:
    """Non-squareness estimate 2 - sup (|x+y| + |x-y|) / 2 over sphere pairs."""

    alpha: float
    maximizer: tuple[np.ndarray, np.ndarray]
    mesh_error: float


@dataclass(frozen=True)
class ConvexityReport:
    """Modulus-of-convexity estimate at one separation level."""

    eps: float
    delta_x: float
    mesh_error: float


class CorrectorSearchError(RuntimeError):
    """No attainment pair met both corrector bounds at the given resolution."""

    def __init__(self, message: str, best_slacks: tuple[float, float]):
        super().__init__(message)
        self.best_slacks = best_slacks


@dataclass(frozen=True)
class CorrectorResult:
    """Attainment pair meeting both corrector bounds, with remaining slack."""

    witness: PiWitness
    slack_x: float
    slack_f: float


# ---------------------------------------------------------------------------
# Refined modulus estimators


def estimate_phi_mut(space: NormedSpace, q: ModulusQuery,
                     config: EstimatorConfig = EstimatorConfig(), *,
                     refine_rounds: int = 3) -> ModulusEstimate:
    """Supremum of distance-to-Pi over pairs with |x| = mu, |f| = theta.

    Pairs are scaled sphere meshes constrained by ``action >= 1 - delta``;
    2-d estimates are tightened by zoom refinement over both sweep angles.
    When mu * theta < 1 - delta the constraint saturates to the maximally
    aligned pairs (action = mu * theta), whose supremum is 1 - min(mu, theta).
    """
    pi = _cached_pi_sample(space, config)
    dual = space.dual()
    if space.dim == 2:
        x_angles, x_unit = sphere_sample_angles(space, config.resolution)
        f_angles, f_unit = sphere_sample_angles(dual, config.resolution)
    else:
        x_angles = f_angles = None
        x_unit, f_unit = sphere_sample(space, config), sphere_sample(dual, config)

    if q.mu > 0.0:
        xs, x_radii = q.mu * x_unit, np.full(len(x_unit), q.mu)
    else:
        xs = np.zeros((1, space.dim))
        x_radii = np.zeros(1)
        x_angles = np.zeros(1) if x_angles is not None else None
    if q.theta > 0.0:
        fs, f_radii = q.theta * f_unit, np.full(len(f_unit), q.theta)
    else:
        fs = np.zeros((1, space.dim))
        f_radii = np.zeros(1)
        f_angles = np.zeros(1) if f_angles is not None else None

    floor = min(1.0 - q.delta, q.mu * q.theta)
    outer_gap = max(mesh_gap(space, xs, config.seed) if len(xs) > 1 else 0.0,
                    mesh_gap(dual, fs, config.seed) if len(fs) > 1 else 0.0)
    return _sup_over_pairs(space, config, xs, fs, floor, pi,
                           x_angles=x_angles, x_radii=x_radii,
                           f_angles=f_angles, f_radii=f_radii,
                           refine_rounds=refine_rounds, outer_gap=outer_gap)


def estimate_phi(space: NormedSpace, delta: float, mode: str,
                 config: EstimatorConfig = EstimatorConfig(), *,
                 refine_rounds: int = 3) -> ModulusEstimate:
    """Modulus estimate at level delta: ball mode or sphere mode."""
    return hausdorff_modulus_set(space, delta, mode, config,
                                 refine_rounds=refine_rounds)


# ---------------------------------------------------------------------------
# Non-squareness parameter and modulus of convexity


def _pair_norm_profile(space: NormedSpace, pts: np.ndarray):
    """Norms |x_i + x_j| and |x_i - x_j| for all sample pairs, chunked."""
    n = len(pts)
    sums = np.empty((n, n))
    diffs = np.empty((n, n))
    block = max(1, 2_000_000 // max(n, 1))
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        plus = pts[lo:hi, None, :] + pts[None, :, :]
        minus = pts[lo:hi, None, :] - pts[None, :, :]
        sums[lo:hi] = space.norm_rows(plus.reshape(-1, space.dim)).reshape(hi - lo, n)
        diffs[lo:hi] = space.norm_rows(minus.reshape(-1, space.dim)).reshape(hi - lo, n)
    return sums, diffs


def _alpha_points(space: NormedSpace, config: EstimatorConfig):
    # pair enumeration is quadratic; cap the sphere mesh above dimension 2
    if space.dim <= 2:
        return sphere_sample(space, config)
    eff = EstimatorConfig(resolution=min(config.resolution, 64), tol=config.tol,
                          delta_slack=config.delta_slack, seed=config.seed,
                          threads=config.threads)
    return sphere_sample(space, eff)


def estimate_alpha(space: NormedSpace,
                   config: EstimatorConfig = EstimatorConfig()) -> AlphaReport:
    """Estimate the non-squareness parameter by a sphere-pair sweep.

    The objective (|x+y| + |x-y|) / 2 is convex in each argument, so its
    supremum over the ball product is attained on sphere pairs; interior
    sampling is audited separately, not assumed (audit_alpha_interior).
    """
    pts = _alpha_points(space, config)
    sums, diffs = _pair_norm_profile(space, pts)
    obj = (sums + diffs) / 2.0
    flat = int(np.argmax(obj))
    i0, j0 = divmod(flat, len(pts))
    best = float(obj[i0, j0])
    bx, by = pts[i0].copy(), pts[j0].copy()

    if space.dim == 2:
        angles, _ = sphere_sample_angles(space, config.resolution)
        step = 2.0 * math.pi / config.resolution

        def value(phi1, phi2):
            u = np.array([math.cos(phi1), math.sin(phi1)])
            v = np.array([math.cos(phi2), math.sin(phi2)])
            u = u / space.norm(u)
            v = v / space.norm(v)
            return (space.norm(u + v) + space.norm(u - v)) / 2.0, u, v

        c1, c2 = float(angles[i0]), float(angles[j0])
        w = step
        for _ in range(4):
            for p1 in np.linspace(c1 - w, c1 + w, 5):
                for p2 in np.linspace(c2 - w, c2 + w, 5):
                    v, u1, u2 = value(p1, p2)
                    if v > best:
                        best, bx, by, c1, c2 = v, u1, u2, p1, p2
            w *= 0.35

    gap = mesh_gap(space, pts, config.seed)
    return AlphaReport(alpha=2.0 - best, maximizer=(bx, by), mesh_error=gap)


def audit_alpha_interior(space: NormedSpace, report: AlphaReport,
                         config: EstimatorConfig = EstimatorConfig(),
                         trials: int = 512) -> float:
    """Worst interior-pair objective; callers assert it stays below the sphere max."""
    rng = np.random.default_rng(config.seed)
    dirs = rng.standard_normal((2 * trials, space.dim))
    dirs /= space.norm_rows(dirs)[:, None]
    radii = rng.uniform(0.0, 1.0, size=2 * trials)
    pts = dirs * radii[:, None]
    x, y = pts[:trials], pts[trials:]
    obj = (space.norm_rows(x + y) + space.norm_rows(x - y)) / 2.0
    return float(obj.max())


def convexity_profile(space: NormedSpace, eps_values,
                      config: EstimatorConfig = EstimatorConfig()) -> list[ConvexityReport]:
    """Modulus-of-convexity estimates sharing one pair sweep.

    For each eps, midpoint norms are maximized over sphere pairs whose
    separation lies in [eps, eps + band] with band twice the mesh gap; the
    hard equality constraint is infeasible on a mesh, and the one-sided band
    never overshoots the constrained supremum because that supremum is
    non-increasing in the separation.
    """
    pts = _alpha_points(space, config)
    sums, diffs = _pair_norm_profile(space, pts)
    gap = mesh_gap(space, pts, config.seed)
    band = 2.0 * gap
    reports = []
    for eps in eps_values:
        if not (0.0 < eps <= 2.0):
            raise ValueError(f"eps must be in (0, 2], got {eps}")
        mask = (diffs >= eps - 1e-12) & (diffs <= eps + band)
        if not mask.any():
            raise EmptyConstraintError(
                f"no sphere pair with separation within [{eps}, {eps + band}]")
        best = float((sums[mask] / 2.0).max())
        reports.append(ConvexityReport(eps=eps, delta_x=max(0.0, 1.0 - best),
                                       mesh_error=band + gap))
    return reports


def estimate_convexity_modulus(space: NormedSpace, eps: float,
                               config: EstimatorConfig = EstimatorConfig()) -> ConvexityReport:
    """Modulus of convexity at a single separation level."""
    return convexity_profile(space, [eps], config)[0]


def check_alpha_self_dual(space: NormedSpace,
                          config: EstimatorConfig = EstimatorConfig()) -> tuple[AlphaReport, AlphaReport]:
    """Non-squareness estimates of a space and of its constructed dual."""
    if space.dim > 3:
        raise SpaceError("self-duality check is limited to dimension 3")
    return estimate_alpha(space, config), estimate_alpha(space.dual(), config)


# ---------------------------------------------------------------------------
# Constructive corrector


def collapse_k(delta: float, alpha_tilde: float) -> float:
    """Step size balancing both corrector bounds.

    k = sqrt(delta / (2 - (2/3) alpha_tilde)) makes the point bound delta/k
    and the functional bound 2k - (2/3) k alpha_tilde both equal to
    sqrt(2 delta) sqrt(1 - alpha_tilde / 3).
    """
    if not (0.0 < alpha_tilde <= ALPHA_CEILING + 1e-12):
        raise RegimeError(f"alpha_tilde must be in (0, {ALPHA_CEILING:.6f}]")
    if not (0.0 < delta < 0.5 - alpha_tilde / 6.0):
        raise RegimeError("delta must be in (0, 1/2 - alpha_tilde/6)")
    return math.sqrt(delta / (2.0 - (2.0 / 3.0) * alpha_tilde))


def bpb_corrector(space: NormedSpace, p: PairState, delta: float, k: float,
                  alpha_tilde: float,
                  config: EstimatorConfig = EstimatorConfig()) -> CorrectorResult:
    """Attainment pair within delta/k of the point and 2k - (2/3)k*alpha_tilde
    of the functional.

    Existence is guaranteed whenever the dual non-squareness parameter
    exceeds alpha_tilde (the caller's responsibility); a search failure at
    high resolution therefore indicates a bug or an invalid alpha_tilde.
    The search scans sampled attainment pairs by lowest violation, breaking
    ties toward the lowest sample index, and refines along the sweep and the
    dual faces when the mesh alone does not satisfy both bounds.
    """
    tol = max(config.tol, 1e-9)
    if abs(p.norm_x - 1.0) > tol or abs(p.norm_f - 1.0) > tol:
        raise ValueError("corrector requires a unit-sphere pair")
    if not p.action > 1.0 - delta - 1e-12:
        raise ValueError("corrector requires action > 1 - delta")
    if not (0.0 < k <= 0.5):
        raise RegimeError("k must be in (0, 1/2]")
    if not (0.0 < alpha_tilde <= ALPHA_CEILING + 1e-12):
        raise RegimeError(f"alpha_tilde must be in (0, {ALPHA_CEILING:.6f}]")
    if not (0.0 < delta < 2.0):
        raise RegimeError("delta must be in (0, 2)")

    b1 = delta / k
    b2 = 2.0 * k - (2.0 / 3.0) * k * alpha_tilde
    pi = _cached_pi_sample(space, config)
    dual = pi.dual
    d1 = space.norm_rows(p.x[None, :] - pi.points)
    d2 = dual.norm_rows(p.f[None, :] - pi.functionals)
    viol = np.maximum(d1 - b1, 0.0) + np.maximum(d2 - b2, 0.0)
    i0 = int(np.argmin(viol))
    best = (float(viol[i0]), pi.points[i0], pi.functionals[i0],
            float(d1[i0]), float(d2[i0]))

    if best[0] > 0.0 and space.dim == 2 and pi.sweep_angles is not None:
        i_sweep = int(np.argmin(viol[: pi.sweep_count]))
        step = 2.0 * math.pi / pi.sweep_count

        def v_angle(phi):
            y = np.array([math.cos(phi), math.sin(phi)])
            y = y / space.norm(y)
            g = space.support(y)
            a, b = space.norm(p.x - y), dual.norm(p.f - g)
            return max(a - b1, 0.0) + max(b - b2, 0.0), y, g, a, b

        phi, _ = _zoom_scalar(lambda t: v_angle(t)[0],
                              float(pi.sweep_angles[i_sweep]), step)
        cand = v_angle(phi)
        if cand[0] < best[0]:
            best = cand
        if best[0] > 0.0:
            for seg in pi.faces:
                a = space.norm(p.x - seg.vertex)

                def v_face(t, seg=seg, a=a):
                    g = (1.0 - t) * seg.g_lo + t * seg.g_hi
                    b = dual.norm(p.f - g)
                    return max(a - b1, 0.0) + max(b - b2, 0.0)

                t_best, v = _golden_min(v_face, 0.0, 1.0, iters=50)
                if v < best[0]:
                    g = (1.0 - t_best) * seg.g_lo + t_best * seg.g_hi
                    g = g / dual.norm(g)
                    best = (v, seg.vertex, g, a, dual.norm(p.f - g))

    violation, y, g, a, b = best
    if violation > 1e-12:
        raise CorrectorSearchError(
            f"no attainment pair met both bounds (best slacks {b1 - a:.3e}, {b2 - b:.3e})",
            best_slacks=(b1 - a, b2 - b))
    return CorrectorResult(witness=PiWitness(np.array(y), np.array(g), max(a, b)),
                           slack_x=b1 - a, slack_f=b2 - b)


def _zoom_scalar(fn, x0: float, halfwidth: float, rounds: int = 5, npts: int = 13):
    best_x, best_v = x0, fn(x0)
    center, w = x0, halfwidth
    for _ in range(rounds):
        for x in np.linspace(center - w, center + w, npts):
            v = fn(x)
            if v < best_v:
                best_x, best_v = x, v
        center = best_x
        w *= 2.0 / (npts - 1)
    return best_x, best_v
