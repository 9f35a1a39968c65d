import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpbmod import (DimensionMismatchError, EstimatorConfig, Lp, Polytope,
                    SpaceError, SpaceSpecError, Sum1, SumInf, describe_json,
                    dual_norm, dual_space, norm, parse_space, sphere_sample,
                    support_functional)
from bpbmod.verify import polytope_gauge_lp_oracle

RNG = np.random.default_rng(20240810)


# ---------------------------------------------------------------------------
# norm


def test_norm_linf(linf):
    assert norm(linf, [1.0, -1.0]) == 1.0


def test_norm_l1(l1):
    assert norm(l1, [0.3, -0.4]) == pytest.approx(0.7, abs=1e-15)


def test_norm_polytope_matches_lp_oracle(diamond):
    v = [0.5, 0.5]
    expected = polytope_gauge_lp_oracle(diamond.vertices, v)
    assert expected == pytest.approx(1.0, abs=1e-12)
    assert norm(diamond, v) == pytest.approx(expected, abs=1e-12)
    # the diamond gauge is the 1-norm
    for vec in RNG.standard_normal((20, 2)):
        assert norm(diamond, vec) == pytest.approx(np.abs(vec).sum(), abs=1e-12)


def test_norm_dimension_mismatch(l2):
    with pytest.raises(DimensionMismatchError):
        norm(l2, [1.0, 2.0, 3.0])


def test_polytope_requires_symmetry():
    with pytest.raises(SpaceError):
        Polytope(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]))


def test_polytope_requires_interior():
    with pytest.raises(SpaceError):
        Polytope(np.array([[1.0, 0.0], [-1.0, 0.0]]))  # a segment in the plane


# ---------------------------------------------------------------------------
# dual norm


def test_dual_norm_linf(linf):
    assert dual_norm(linf, [0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)


def test_dual_norm_square_vertices(square):
    assert dual_norm(square, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-15)


def test_dual_norm_sum1(sum1_rr):
    assert dual_norm(sum1_rr, [0.3, 0.9]) == pytest.approx(0.9, abs=1e-15)


def test_dual_norm_lp_conjugate():
    space = Lp(1.5, 3)
    f = np.array([0.2, -1.1, 0.7])
    q = 3.0  # conjugate of 1.5
    assert dual_norm(space, f) == pytest.approx(np.sum(np.abs(f) ** q) ** (1 / q), rel=1e-12)


# ---------------------------------------------------------------------------
# support functionals


def test_support_l2(l2):
    np.testing.assert_allclose(support_functional(l2, [3.0, 4.0]), [0.6, 0.8],
                               atol=1e-15)


def test_support_linf_unique_facet(linf):
    np.testing.assert_allclose(support_functional(linf, [0.5, 1.0]), [0.0, 1.0],
                               atol=1e-15)


def test_support_l1_sign_vector(l1):
    np.testing.assert_allclose(support_functional(l1, [1.0, 0.0]), [1.0, 0.0],
                               atol=1e-15)


def test_support_rejects_zero(l2):
    with pytest.raises(SpaceError):
        support_functional(l2, [0.0, 0.0])


def test_support_barycentric_at_linf_vertex(linf):
    # at a ball vertex the subdifferential face is averaged
    np.testing.assert_allclose(support_functional(linf, [1.0, 1.0]), [0.5, 0.5],
                               atol=1e-12)


@pytest.mark.parametrize("space_key", ["l1", "l2", "linf", "hexagon", "sum1_rr",
                                       "suminf_rr"])
def test_support_properties(space_key, request):
    space = request.getfixturevalue(space_key)
    for v in RNG.standard_normal((40, space.dim)):
        if norm(space, v) < 1e-9:
            continue
        f = support_functional(space, v)
        assert float(np.dot(f, v)) >= norm(space, v) - 1e-9
        assert dual_norm(space, f) <= 1.0 + 1e-9


def test_support_lp_general():
    space = Lp(3.0, 3)
    v = np.array([0.5, -1.2, 0.1])
    f = support_functional(space, v)
    assert float(np.dot(f, v)) == pytest.approx(norm(space, v), rel=1e-12)
    assert dual_norm(space, f) == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------------------
# duality pairing, bidual, sums


@pytest.mark.parametrize("space_key", ["l1", "l2", "linf", "hexagon", "diamond",
                                       "sum1_rr", "suminf_rr"])
def test_holder_pairing(space_key, request):
    space = request.getfixturevalue(space_key)
    vs = RNG.standard_normal((30, space.dim))
    fs = RNG.standard_normal((30, space.dim))
    for v, f in zip(vs, fs):
        assert abs(np.dot(f, v)) <= dual_norm(space, f) * norm(space, v) + 1e-9


def test_bidual_polytope_dim2(hexagon):
    polar = hexagon.dual()
    for v in RNG.standard_normal((25, 2)):
        assert polar.dual_norm(v) == pytest.approx(hexagon.norm(v), abs=1e-10)


def test_bidual_polytope_dim3():
    octa = Polytope(np.vstack([np.eye(3), -np.eye(3)]))
    polar = octa.dual()
    for v in RNG.standard_normal((10, 3)):
        assert polar.dual_norm(v) == pytest.approx(octa.norm(v), abs=1e-8)


def test_dual_space_constructions(l1, l2, linf, sum1_rr, suminf_rr):
    assert dual_space(l1) == Lp(math.inf, 2)
    assert dual_space(linf) == Lp(1.0, 2)
    assert dual_space(l2) == l2
    assert isinstance(dual_space(sum1_rr), SumInf)
    assert isinstance(dual_space(suminf_rr), Sum1)


def test_sum_norms_exact(r1):
    s1, si = Sum1(r1, r1), SumInf(r1, r1)
    for v in RNG.standard_normal((20, 2)):
        assert norm(s1, v) == abs(v[0]) + abs(v[1])
        assert norm(si, v) == max(abs(v[0]), abs(v[1]))


def test_nested_sum_dims(r1, l2):
    nested = Sum1(SumInf(r1, r1), l2)
    assert nested.dim == 4
    v = np.array([1.0, -2.0, 3.0, 4.0])
    assert norm(nested, v) == pytest.approx(2.0 + 5.0, abs=1e-12)


# ---------------------------------------------------------------------------
# norm axioms (property-based)


@st.composite
def vectors(draw, dim=2):
    return np.array([draw(st.floats(-10, 10, allow_nan=False)) for _ in range(dim)])


@given(u=vectors(), v=vectors(), lam=st.floats(-5, 5, allow_nan=False))
@settings(max_examples=150, deadline=None)
def test_norm_axioms_hexagon(u, v, lam, hexagon):
    nu, nv = norm(hexagon, u), norm(hexagon, v)
    assert norm(hexagon, u + v) <= nu + nv + 1e-9
    assert norm(hexagon, lam * u) == pytest.approx(abs(lam) * nu, abs=1e-9)
    if nu == 0.0:
        assert np.all(u == 0.0)


@given(u=vectors(dim=3), v=vectors(dim=3))
@settings(max_examples=100, deadline=None)
def test_norm_axioms_lp(u, v):
    space = Lp(2.5, 3)
    assert norm(space, u + v) <= norm(space, u) + norm(space, v) + 1e-9


# ---------------------------------------------------------------------------
# sphere sampling


def test_sphere_sample_l2_axes(l2):
    pts = sphere_sample(l2, EstimatorConfig(resolution=8))
    assert len(pts) == 8
    np.testing.assert_allclose(pts[0], [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(l2.norm_rows(pts), 1.0, atol=1e-12)


def test_sphere_sample_angular_gap(linf):
    res = 400
    pts = sphere_sample(linf, EstimatorConfig(resolution=res))
    angles = np.arctan2(pts[:, 1], pts[:, 0])
    gaps = np.diff(np.sort(angles))
    assert gaps.max() <= 2.0 * math.pi / res + 1e-9


def test_sphere_sample_sum1(sum1_rr):
    pts = sphere_sample(sum1_rr, EstimatorConfig(resolution=100))
    np.testing.assert_allclose(np.abs(pts).sum(axis=1), 1.0, atol=1e-12)


def test_sphere_sample_dim3_membership():
    space = Lp(2.0, 3)
    pts = sphere_sample(space, EstimatorConfig(resolution=16))
    assert len(pts) == 256
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)


def test_sphere_sample_dim4_seeded():
    space = Lp(1.0, 4)
    a = sphere_sample(space, EstimatorConfig(resolution=8, seed=5))
    b = sphere_sample(space, EstimatorConfig(resolution=8, seed=5))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(np.abs(a).sum(axis=1), 1.0, atol=1e-12)


def test_sphere_sample_dim_limit():
    with pytest.raises(SpaceError):
        sphere_sample(Lp(2.0, 5), EstimatorConfig(resolution=8))


def test_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(resolution=4)
    with pytest.raises(ValueError):
        EstimatorConfig(tol=0.0)


# ---------------------------------------------------------------------------
# spec grammar and describe


@pytest.mark.parametrize("spec,kind,dim", [
    ("l2:2", "lp", 2),
    ("l1:3", "lp", 3),
    ("linf:2", "lp", 2),
    ("lp:3:p=1.5", "lp", 3),
    ("r:1", "lp", 1),
    ("sum1(r:1,r:1)", "sum1", 2),
    ("suminf(l2:2,r:1)", "suminf", 3),
    ("sum1(suminf(r:1,r:1),l2:2)", "sum1", 4),
])
def test_parse_space(spec, kind, dim):
    space = parse_space(spec)
    d = space.describe()
    assert d["kind"] == kind
    assert space.dim == dim


def test_parse_poly_file(tmp_path):
    path = tmp_path / "ball.json"
    path.write_text(json.dumps({"vertices": [[1, 0], [-1, 0], [0, 1], [0, -1]]}))
    space = parse_space(f"poly:@{path}")
    assert isinstance(space, Polytope)
    assert space.norm([0.5, 0.5]) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("bad", ["", "l3:2", "lp:2", "sum1(l2:2)", "poly:@/no/file",
                                 "sum2(r:1,r:1)"])
def test_parse_errors(bad):
    with pytest.raises(SpaceSpecError):
        parse_space(bad)


def test_describe_json_is_byte_stable():
    a = describe_json(parse_space("sum1(linf:2,lp:2:p=1.5)"))
    b = describe_json(parse_space("sum1(linf:2,lp:2:p=1.5)"))
    assert a == b
    assert json.loads(a)["kind"] == "sum1"
