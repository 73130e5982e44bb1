import numpy as np
import pytest

from scaled_fields import (
    AffineChart,
    CallableChart,
    ChartRangeError,
    CrossUniverseError,
    IdentityChart,
    TaggedCoordinate,
    TanhChart,
    UniverseTag,
    chart_apply,
    chart_invert,
    make_chart,
    same_chart_check,
    transport_point,
)
from scaled_fields.errors import DomainError

X = UniverseTag((0.0, 0.0))
Y = UniverseTag((1.0, -1.0))


def test_tags_compare_by_point():
    assert UniverseTag((1, 2)) == UniverseTag.at(1.0, 2.0)
    assert UniverseTag((1, 2)) != UniverseTag((1, 2.5))


def test_identity_apply_and_invert():
    c = chart_apply(IdentityChart(2), X, (1, 2))
    assert c == TaggedCoordinate(X, (1.0, 2.0))
    np.testing.assert_array_equal(chart_invert(IdentityChart(2), c), [1, 2])


def test_affine_example():
    chart = AffineChart([[2.0]], [1.0])
    tag = UniverseTag((0.0,))
    c = chart_apply(chart, tag, (3,))
    assert c.u == (7.0,)
    assert chart_invert(chart, TaggedCoordinate(tag, (7.0,)))[0] == pytest.approx(3.0, abs=1e-12)


def test_tanh_fixed_point_and_range():
    chart = TanhChart(1)
    tag = UniverseTag((0.0,))
    assert chart_apply(chart, tag, (0,)).u == (0.0,)
    with pytest.raises(ChartRangeError):
        chart_invert(chart, TaggedCoordinate(tag, (0.99999999999,)))
    with pytest.raises(ChartRangeError):
        chart_invert(chart, TaggedCoordinate(tag, (1.5,)))


def test_newton_inverse_for_callable_chart():
    # u = p + 0.3 sin(p) is monotone, no closed-form inverse
    chart = CallableChart(1, lambda p: p + 0.3 * np.sin(p))
    tag = UniverseTag((0.0,))
    for p in np.linspace(-4, 4, 17):
        c = chart_apply(chart, tag, (p,))
        assert chart_invert(chart, c)[0] == pytest.approx(p, abs=1e-9)


def test_make_chart_rejects_unknown():
    with pytest.raises(DomainError):
        make_chart("polar", 2)


def test_singular_affine_rejected():
    with pytest.raises(DomainError):
        AffineChart([[1.0, 2.0], [2.0, 4.0]])


def test_transport_point():
    c = TaggedCoordinate(Y, (1, 2))
    moved = transport_point(c, X)
    assert moved == TaggedCoordinate(X, (1.0, 2.0))
    assert np.array(moved.u).tobytes() == np.array(c.u).tobytes()
    assert transport_point(c, Y) == c
    assert transport_point(transport_point(c, X), Y) == c


def test_4d_transport_keeps_tuple():
    tx, ty = UniverseTag((0, 0, 0, 0)), UniverseTag((1, 1, 1, 1))
    assert transport_point(TaggedCoordinate(ty, (1, 2, 3, 4)), tx).u == (1.0, 2.0, 3.0, 4.0)


def test_coordinate_arithmetic_tag_discipline():
    a, b = TaggedCoordinate(X, (1, 2)), TaggedCoordinate(X, (0.5, 0.5))
    assert (a - b).u == (0.5, 1.5)
    assert (a + b).u == (1.5, 2.5)
    with pytest.raises(CrossUniverseError):
        a - TaggedCoordinate(Y, (0.5, 0.5))
    with pytest.raises(CrossUniverseError):
        a + TaggedCoordinate(Y, (0.5, 0.5))


@pytest.mark.parametrize(
    "chart,tol",
    [
        (IdentityChart(2), 0.0),
        (AffineChart([[1.5, 0.2], [-0.3, 0.9]], [0.1, -2.0]), 1e-9),
        (TanhChart(2, scale=[1.0, 2.0]), 1e-8),
    ],
)
def test_same_chart_check(chart, tol, rng):
    report = same_chart_check(chart, X, Y, 100, box=[(-2, 2), (-2, 2)], rng=rng)
    assert report.max_deviation <= tol
