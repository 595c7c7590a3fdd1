import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from lyapopt.constraints import Ball, Box, Singleton, VPolytope, constraint_from_dict, min_norm_point
from lyapopt.exceptions import InvalidArgumentError, SchemaError

pts = st.integers(1, 8).flatmap(
    lambda k: st.lists(st.lists(st.floats(-3, 3), min_size=2, max_size=2), min_size=k, max_size=k)
).map(np.array)
vec2 = st.lists(st.floats(-4, 4), min_size=2, max_size=2).map(np.array)


def in_hull(V, y):
    # feasibility LP: y = V^T lam, lam >= 0, sum lam = 1
    A = np.vstack([V.T, np.ones(V.shape[0])])
    b = np.concatenate([y, [1.0]])
    res = linprog(np.zeros(V.shape[0]), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


@given(pts, vec2)
def test_projection_variational_inequality(V, y):
    C = VPolytope(V)
    p = C.project(y)
    scale = 1 + np.abs(V).max() + np.abs(y).max()
    # <y - p, v - p> <= 0 for every vertex characterizes the projection
    assert np.max((V - p) @ (y - p)) <= 1e-8 * scale**2
    assert C.distance(p) <= 1e-7 * scale


@given(pts)
def test_min_norm_point_is_in_hull_and_optimal(V):
    x = min_norm_point(V)
    scale = 1 + np.abs(V).max()
    assert np.min(V @ x) >= x @ x - 1e-8 * scale**2


def test_min_norm_point_segment():
    np.testing.assert_allclose(min_norm_point(np.array([[1.0, -1.0], [1.0, 1.0]])), [1.0, 0.0], atol=1e-12)


def test_box_projection_and_distance():
    C = Box([0, 0], [1, 2])
    np.testing.assert_allclose(C.project([2, -1]), [1, 0])
    assert C.distance([2, -1]) == pytest.approx(np.sqrt(2))
    assert C.contains([0.5, 2.0])
    assert sorted(map(tuple, C.vertices())) == [(0, 0), (0, 2), (1, 0), (1, 2)]


def test_ball_projection():
    C = Ball([0, 0], 1)
    np.testing.assert_allclose(C.project([0, 3]), [0, 1])
    assert C.distance([0, 3]) == pytest.approx(2.0)
    assert C.support([0, 0])[1].tolist() == [0, 0]


def test_singleton():
    C = Singleton([0.5])
    assert C.distance([0.75]) == pytest.approx(0.25)
    assert C.contains([0.5 + 1e-12])
    assert not C.contains([0.5 + 1e-6])


def test_vpolytope_tie_break_lowest_vertex():
    C = VPolytope([[0, 1], [1, 1], [0.5, 0]])
    v, c = C.support([0, 1])
    assert v == 1 and c.tolist() == [0, 1]


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"type": "box", "lo": [1], "hi": [0]}, "C"),
        ({"type": "ball", "center": [0], "radius": -1}, "C"),
        ({"type": "vpolytope", "vertices": []}, "C"),
        ({"type": "box", "lo": [0]}, "C.hi"),
        ({"type": "cone"}, "C.type"),
        ([1, 2], "C"),
    ],
)
def test_from_dict_errors(doc, field):
    with pytest.raises(SchemaError) as err:
        constraint_from_dict(doc, 1)
    assert err.value.field == field


def test_from_dict_round_trip():
    for C in (Singleton([1, 2]), Box([0, 0], [1, 1]), Ball([0, 1], 2), VPolytope([[0, 0], [1, 0], [0, 1]])):
        assert constraint_from_dict(C.to_dict(), 2) == C


def test_box_rejects_inverted():
    with pytest.raises(InvalidArgumentError):
        Box([1], [0])


@given(pts, vec2)
def test_vpolytope_membership_matches_lp(V, y):
    C = VPolytope(V)
    d = C.distance(y)
    if d > 1e-6:
        assert not in_hull(V, y)
    elif d == 0.0:
        assert np.allclose(C.project(y), y)
