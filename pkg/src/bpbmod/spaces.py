"""Finite-dimensional real normed spaces as exact norm oracles.

Every space exposes the primal norm, the dual norm, supporting functionals,
a constructible dual space, and deterministic unit-sphere samplers.  All
instances are immutable after construction and every operation is a pure
function, so concurrent use needs no coordination.

Functionals are represented by coordinate vectors acting through the dot
product.  Supported space kinds:

* ``Lp(p, dim)``        -- p in [1, inf], p = 1 and p = inf handled natively.
* ``Polytope(V)``       -- Minkowski gauge of the convex hull of a centrally
                           symmetric vertex list.
* ``Sum1(A, B)``        -- direct sum normed by the sum of component norms.
* ``SumInf(A, B)``      -- direct sum normed by the max of component norms.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

__all__ = [
    "SpaceError",
    "DimensionMismatchError",
    "SpaceSpecError",
    "EstimatorConfig",
    "NormedSpace",
    "Lp",
    "Polytope",
    "Sum1",
    "SumInf",
    "as_vector",
    "norm",
    "dual_norm",
    "support_functional",
    "dual_space",
    "sphere_sample",
    "sphere_sample_angles",
    "mesh_gap",
    "parse_space",
    "describe",
    "describe_json",
]

# Vertex lists must contain -v for every v up to this absolute slack.
_SYMMETRY_TOL = 1e-12
# Tie detection for subdifferential faces (argmax sets, equal component norms).
_TIE_TOL = 1e-12
_LP_GAUGE_TOL = 1e-10
_SAMPLE_DIM_LIMIT = 4


class SpaceError(ValueError):
    """Invalid space construction or operand."""


class DimensionMismatchError(SpaceError):
    """Operand dimension does not match the ambient space."""


class SpaceSpecError(SpaceError):
    """Malformed space-spec string."""


def as_vector(coords, dim: int | None = None) -> np.ndarray:
    """Validate and convert coordinates to a float vector."""
    v = np.atleast_1d(np.asarray(coords, dtype=float))
    if v.ndim != 1 or v.size < 1:
        raise SpaceError(f"expected a 1-d coordinate list, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise SpaceError("coordinates must be finite")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


@dataclass(frozen=True)
class EstimatorConfig:
    """Sampling parameters shared by all grid estimators.

    resolution   samples per sphere dimension (2-d spheres get exactly
                 ``resolution`` angles; 3-d and 4-d spheres get
                 ``resolution**2`` and ``resolution**3`` points)
    tol          numerical tolerance for membership and identity checks
    delta_slack  shift applied to the almost-attainment constraint; the
                 estimators use ``action >= 1 - delta + delta_slack`` since a
                 mesh cannot represent the open condition ``> 1 - delta``
    seed         seed for the randomized samplers (4-d spheres, audits)
    threads      chunk-level parallelism cap; results are deterministic for
                 any thread count (ties broken by lowest sample index)
    """

    resolution: int = 400
    tol: float = 1e-9
    delta_slack: float = 0.0
    seed: int = 1729
    threads: int = 1

    def __post_init__(self):
        if self.resolution < 8:
            raise ValueError("resolution must be at least 8")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.delta_slack < 0:
            raise ValueError("delta_slack must be nonnegative")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


class NormedSpace:
    """Base class for norm oracles.  Subclasses implement the row kernels."""

    dim: int

    # -- scalar front ends -------------------------------------------------

    def norm(self, v) -> float:
        v = as_vector(v, self.dim)
        return float(self.norm_rows(v[None, :])[0])

    def dual_norm(self, f) -> float:
        f = as_vector(f, self.dim)
        return float(self.dual_norm_rows(f[None, :])[0])

    def action(self, f, v) -> float:
        """Evaluate the functional f on the vector v (dot product)."""
        return float(np.dot(as_vector(f, self.dim), as_vector(v, self.dim)))

    def unit(self, v) -> np.ndarray:
        """Radial projection of a nonzero vector onto the unit sphere."""
        v = as_vector(v, self.dim)
        n = self.norm(v)
        if n == 0.0:
            raise SpaceError("cannot normalize the zero vector")
        return v / n

    # -- kind-specific kernels ---------------------------------------------

    def norm_rows(self, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dual_norm_rows(self, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def support(self, v) -> np.ndarray:
        """A norm-one functional attaining the norm at v.

        At non-smooth points the barycentric center of the subdifferential
        face is returned, so the output is deterministic.
        """
        raise NotImplementedError

    def dual(self) -> "NormedSpace":
        raise NotImplementedError

    def ball_vertices(self) -> np.ndarray:
        """Non-smooth extreme points of the unit ball, when enumerable.

        Returns an ``(k, dim)`` array; empty for smooth balls and for kinds
        whose extreme points form a continuum.  Used to cover the face
        structure of the norm-attainment set in two dimensions.
        """
        return np.zeros((0, self.dim))

    def spec(self) -> str:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec()}>"


def _conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True, repr=False)
class Lp(NormedSpace):
    """Sequence space with the p-norm; p = 1 and p = inf are native."""

    p: float
    dim: int

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise SpaceError(f"p must be >= 1, got {self.p}")
        if self.dim < 1:
            raise SpaceError("dimension must be >= 1")

    def norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        a = np.abs(rows)
        if self.p == math.inf:
            return a.max(axis=1)
        if self.p == 1.0:
            return a.sum(axis=1)
        if self.p == 2.0:
            return np.sqrt((a * a).sum(axis=1))
        # scale out the max to keep |.|**p in range for large p
        m = a.max(axis=1)
        safe = np.where(m > 0.0, m, 1.0)
        s = ((a / safe[:, None]) ** self.p).sum(axis=1)
        return m * s ** (1.0 / self.p)

    def dual_norm_rows(self, rows):
        return Lp(_conjugate_exponent(self.p), self.dim).norm_rows(rows)

    def support(self, v):
        v = as_vector(v, self.dim)
        a = np.abs(v)
        nv = self.norm(v)
        if nv == 0.0:
            raise SpaceError("support functional undefined at the origin")
        if self.p == math.inf:
            # barycenter of the dual face spanned by the maximal coordinates
            top = a >= a.max() * (1.0 - _TIE_TOL)
            f = np.where(top, np.sign(v), 0.0)
            return f / top.sum()
        if self.p == 1.0:
            # sign vector; zero coordinates tie-broken to 0
            return np.sign(v)
        f = np.sign(v) * (a / nv) ** (self.p - 1.0)
        return f

    def dual(self):
        return Lp(_conjugate_exponent(self.p), self.dim)

    def ball_vertices(self):
        if self.dim == 1:
            return np.array([[1.0], [-1.0]])
        if self.p == 1.0:
            eye = np.eye(self.dim)
            return np.concatenate([eye, -eye], axis=0)
        if self.p == math.inf:
            return np.array(list(itertools.product((1.0, -1.0), repeat=self.dim)))
        return np.zeros((0, self.dim))

    def spec(self):
        if self.p == 1.0:
            return f"l1:{self.dim}"
        if self.p == 2.0:
            return f"l2:{self.dim}"
        if self.p == math.inf:
            return f"linf:{self.dim}"
        return f"lp:{self.dim}:p={self.p:g}"

    def describe(self):
        return {"kind": "lp", "p": "inf" if self.p == math.inf else self.p, "dim": self.dim}


@dataclass(frozen=True, eq=False, repr=False)
class Polytope(NormedSpace):
    """Norm whose unit ball is the convex hull of a symmetric vertex list."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 1:
            raise SpaceError("vertex list must be a (k, dim) array with k >= 2")
        if not np.all(np.isfinite(v)):
            raise SpaceError("vertices must be finite")
        scale = np.abs(v).max()
        for row in v:
            if np.abs(v + row).max(axis=1).min() > _SYMMETRY_TOL * max(scale, 1.0):
                raise SpaceError("vertex list must be centrally symmetric")
        object.__setattr__(self, "vertices", v)
        self._facets  # force hull construction so bad inputs fail fast

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def _facets(self) -> tuple[np.ndarray, np.ndarray]:
        """Facet description (N, c) with ball = {x : N @ x <= c}, c > 0."""
        if self.dim == 1:
            m = float(np.abs(self.vertices).max())
            if m == 0.0:
                raise SpaceError("vertex list must span the space")
            return np.array([[1.0], [-1.0]]), np.array([m, m])
        try:
            hull = ConvexHull(self.vertices)
        except QhullError as exc:
            raise SpaceError("vertex hull has empty interior") from exc
        normals = hull.equations[:, :-1]
        offsets = -hull.equations[:, -1]
        if offsets.min() <= _SYMMETRY_TOL:
            raise SpaceError("origin is not interior to the vertex hull")
        object.__setattr__(self, "_hull_vertex_ids", hull.vertices)
        return normals, offsets

    def norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        if self.dim <= 2:
            # exact edge intersection: gauge is the largest facet ratio
            normals, offsets = self._facets
            return np.maximum((rows @ normals.T) / offsets, 0.0).max(axis=1)
        return np.array([self._gauge_lp(r) for r in rows])

    def _gauge_lp(self, v: np.ndarray) -> float:
        # gauge(v) = min sum(lambda) subject to V^T lambda = v, lambda >= 0
        if not np.any(v):
            return 0.0
        m = self.vertices.shape[0]
        res = linprog(
            np.ones(m),
            A_eq=self.vertices.T,
            b_eq=v,
            bounds=(0.0, None),
            method="highs",
            options={"primal_feasibility_tolerance": _LP_GAUGE_TOL,
                     "dual_feasibility_tolerance": _LP_GAUGE_TOL},
        )
        if res.status != 0:
            raise SpaceError(f"gauge LP failed (status {res.status})")
        return float(res.fun)

    def dual_norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        # sup over the ball equals the max over the vertex list
        return (rows @ self.vertices.T).max(axis=1)

    def support(self, v):
        v = as_vector(v, self.dim)
        g = self.norm(v)
        if g == 0.0:
            raise SpaceError("support functional undefined at the origin")
        normals, offsets = self._facets
        p = v / g
        residual = (normals @ p) / offsets  # 1 on active facets
        active = residual >= 1.0 - 1e-9
        funcs = normals[active] / offsets[active, None]
        return funcs.mean(axis=0)

    def dual(self):
        normals, offsets = self._facets
        return Polytope(normals / offsets[:, None])

    def ball_vertices(self):
        if self.dim == 1:
            m = float(np.abs(self.vertices).max())
            return np.array([[m], [-m]])
        self._facets
        return self.vertices[self._hull_vertex_ids]

    def spec(self):
        return "poly:<inline>"

    def describe(self):
        return {
            "kind": "polytope",
            "dim": self.dim,
            "vertices": [[float(c) for c in row] for row in self.vertices],
        }


@dataclass(frozen=True, repr=False)
class _DirectSum(NormedSpace):
    a: NormedSpace
    b: NormedSpace

    @property
    def dim(self) -> int:
        return self.a.dim + self.b.dim

    def split(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return v[: self.a.dim], v[self.a.dim :]

    def join(self, va, vb) -> np.ndarray:
        return np.concatenate([np.atleast_1d(va), np.atleast_1d(vb)])


class Sum1(_DirectSum):
    """Direct sum normed by the sum of the component norms."""

    def norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        da = self.a.dim
        return self.a.norm_rows(rows[:, :da]) + self.b.norm_rows(rows[:, da:])

    def dual_norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        da = self.a.dim
        return np.maximum(self.a.dual_norm_rows(rows[:, :da]),
                          self.b.dual_norm_rows(rows[:, da:]))

    def support(self, v):
        v = as_vector(v, self.dim)
        va, vb = self.split(v)
        if self.norm(v) == 0.0:
            raise SpaceError("support functional undefined at the origin")
        fa = self.a.support(va) if self.a.norm(va) > 0.0 else np.zeros(self.a.dim)
        fb = self.b.support(vb) if self.b.norm(vb) > 0.0 else np.zeros(self.b.dim)
        return self.join(fa, fb)

    def dual(self):
        return SumInf(self.a.dual(), self.b.dual())

    def ball_vertices(self):
        va = self.a.ball_vertices()
        vb = self.b.ball_vertices()
        za = np.zeros((len(va), self.b.dim))
        zb = np.zeros((len(vb), self.a.dim))
        return np.concatenate(
            [np.hstack([va, za]), np.hstack([zb, vb])], axis=0
        ) if len(va) or len(vb) else np.zeros((0, self.dim))

    def spec(self):
        return f"sum1({self.a.spec()},{self.b.spec()})"

    def describe(self):
        return {"kind": "sum1", "dim": self.dim,
                "a": self.a.describe(), "b": self.b.describe()}


class SumInf(_DirectSum):
    """Direct sum normed by the max of the component norms."""

    def norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        da = self.a.dim
        return np.maximum(self.a.norm_rows(rows[:, :da]),
                          self.b.norm_rows(rows[:, da:]))

    def dual_norm_rows(self, rows):
        rows = np.asarray(rows, dtype=float)
        da = self.a.dim
        return self.a.dual_norm_rows(rows[:, :da]) + self.b.dual_norm_rows(rows[:, da:])

    def support(self, v):
        v = as_vector(v, self.dim)
        va, vb = self.split(v)
        na, nb = self.a.norm(va), self.b.norm(vb)
        n = max(na, nb)
        if n == 0.0:
            raise SpaceError("support functional undefined at the origin")
        if abs(na - nb) <= _TIE_TOL * n:
            # both components attain the max: barycenter of the two faces
            return self.join(self.a.support(va) / 2.0, self.b.support(vb) / 2.0)
        if na > nb:
            return self.join(self.a.support(va), np.zeros(self.b.dim))
        return self.join(np.zeros(self.a.dim), self.b.support(vb))

    def dual(self):
        return Sum1(self.a.dual(), self.b.dual())

    def ball_vertices(self):
        va = self.a.ball_vertices()
        vb = self.b.ball_vertices()
        if len(va) == 0 or len(vb) == 0:
            return np.zeros((0, self.dim))
        return np.array([np.concatenate([x, y]) for x in va for y in vb])

    def spec(self):
        return f"suminf({self.a.spec()},{self.b.spec()})"

    def describe(self):
        return {"kind": "suminf", "dim": self.dim,
                "a": self.a.describe(), "b": self.b.describe()}


# ---------------------------------------------------------------------------
# Operation front ends


def norm(space: NormedSpace, v) -> float:
    return space.norm(v)


def dual_norm(space: NormedSpace, f) -> float:
    return space.dual_norm(f)


def support_functional(space: NormedSpace, v) -> np.ndarray:
    return space.support(v)


def dual_space(space: NormedSpace) -> NormedSpace:
    return space.dual()


def _fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic quasi-uniform mesh of the euclidean 2-sphere."""
    i = np.arange(n, dtype=float) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def sphere_sample_angles(space: NormedSpace, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """2-d sweep: evenly spaced angles and gauge-normalized points."""
    if space.dim != 2:
        raise SpaceError("angular sweep requires a 2-d space")
    angles = np.arange(resolution) * (2.0 * math.pi / resolution)
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    pts = dirs / space.norm_rows(dirs)[:, None]
    return angles, pts


def sphere_sample(space: NormedSpace, config: EstimatorConfig) -> np.ndarray:
    """Deterministic unit-sphere mesh; points have norm 1 up to roundoff.

    Practical limit dim <= 4: the sample count grows like
    ``resolution ** (dim - 1)``.
    """
    if space.dim > _SAMPLE_DIM_LIMIT:
        raise SpaceError(f"sphere sampling is limited to dimension {_SAMPLE_DIM_LIMIT}")
    if space.dim == 1:
        return np.array([[1.0], [-1.0]])
    if space.dim == 2:
        return sphere_sample_angles(space, config.resolution)[1]
    if space.dim == 3:
        dirs = _fibonacci_sphere(config.resolution ** 2)
    else:
        rng = np.random.default_rng(config.seed)
        dirs = rng.standard_normal((config.resolution ** 3, space.dim))
        keep = np.linalg.norm(dirs, axis=1) > 1e-12
        dirs = dirs[keep]
    return dirs / space.norm_rows(dirs)[:, None]


def mesh_gap(space: NormedSpace, pts: np.ndarray, seed: int = 0) -> float:
    """Largest gap of a sphere mesh in the space's own norm.

    Exact cyclic-adjacency bound in 2-d; probe-based estimate otherwise.
    """
    if space.dim == 1:
        return 0.0
    if space.dim == 2:
        diffs = pts - np.roll(pts, -1, axis=0)
        return float(space.norm_rows(diffs).max())
    rng = np.random.default_rng(seed)
    probes = rng.standard_normal((64, space.dim))
    probes /= space.norm_rows(probes)[:, None]
    worst = 0.0
    for q in probes:
        worst = max(worst, float(space.norm_rows(q[None, :] - pts).min()))
    return 2.0 * worst


# ---------------------------------------------------------------------------
# Space-spec grammar:  l1:2 | l2:3 | linf:2 | lp:3:p=1.5 | r:1 |
#                      poly:@file.json | sum1(<spec>,<spec>) | suminf(...)

_LP_RE = re.compile(r"^(l1|l2|linf):(\d+)$")
_LPP_RE = re.compile(r"^lp:(\d+):p=(.+)$")


def _split_top_level(body: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1 :]
    raise SpaceSpecError(f"expected a top-level comma in {body!r}")


def parse_space(spec: str) -> NormedSpace:
    """Parse a space-spec string into a NormedSpace."""
    s = spec.strip()
    if not s:
        raise SpaceSpecError("empty space spec")
    if s in ("r", "r:1"):
        return Lp(2.0, 1)
    m = _LP_RE.match(s)
    if m:
        p = {"l1": 1.0, "l2": 2.0, "linf": math.inf}[m.group(1)]
        return Lp(p, int(m.group(2)))
    m = _LPP_RE.match(s)
    if m:
        ptxt = m.group(2)
        p = math.inf if ptxt in ("inf", "infinity") else float(ptxt)
        return Lp(p, int(m.group(1)))
    for head, cls in (("sum1(", Sum1), ("suminf(", SumInf)):
        if s.startswith(head) and s.endswith(")"):
            left, right = _split_top_level(s[len(head) : -1])
            return cls(parse_space(left), parse_space(right))
    if s.startswith("poly:@"):
        path = Path(s[len("poly:@") :])
        try:
            payload = json.loads(path.read_text())
        except OSError as exc:
            raise SpaceSpecError(f"cannot read polytope file {path}") from exc
        if not isinstance(payload, dict) or "vertices" not in payload:
            raise SpaceSpecError(f"{path} must contain a 'vertices' array")
        return Polytope(np.asarray(payload["vertices"], dtype=float))
    raise SpaceSpecError(f"unrecognized space spec {spec!r}")


def describe(space: NormedSpace) -> dict:
    """Canonical JSON-ready description of a parsed space."""
    return space.describe()


def describe_json(space: NormedSpace) -> str:
    """Byte-stable JSON echo of a parsed space."""
    return json.dumps(space.describe(), sort_keys=True, separators=(",", ":"))
