import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scaled_fields import (
    CrossUniverseError,
    DimensionMismatchError,
    ScaledScalar,
    ScaledVector,
    ScaleMismatchError,
    UniverseTag,
    hilbert_iso_check,
    inner_r,
    make_scaled,
    make_vector,
    norm_r,
    one_r,
    smul_r,
)
from scaled_fields.numbers import relative_deviation

TAG = UniverseTag((0.0,))

# keep clear of the subnormal range, where squared norms underflow
finite = st.floats(-100, 100).map(lambda x: x if abs(x) >= 1e-100 else 0.0)
scales = st.floats(-3, 3).map(lambda e: 10.0**e)


def cvec(n):
    return st.builds(
        lambda re, im: re + 1j * im,
        arrays(float, n, elements=finite),
        arrays(float, n, elements=finite),
    )


def test_smul_example():
    out = smul_r(ScaledScalar(TAG, 2, 4), ScaledVector(TAG, 2, [2, 0]))
    np.testing.assert_array_equal(out.ext, [4, 0])
    np.testing.assert_array_equal(out.value, [2, 0])


def test_smul_identity():
    v = make_vector(TAG, 3.0, [1 + 1j, -2, 0.5j])
    assert smul_r(one_r(TAG, 3.0), v) == v


def test_smul_unit_scale():
    v = ScaledVector(TAG, 1.0, [1, 2, 3])
    out = smul_r(ScaledScalar(TAG, 1.0, 2 - 1j), v)
    np.testing.assert_array_equal(out.ext, (2 - 1j) * np.array([1, 2, 3]))


def test_inner_example():
    a = ScaledVector(TAG, 2, [2, 0])
    ip = inner_r(a, a)
    assert ip.ext == 2
    assert ip.value == 1


def test_inner_unit_scale_is_standard():
    a = ScaledVector(TAG, 1, [1 + 2j, 3])
    b = ScaledVector(TAG, 1, [0.5, -1j])
    assert inner_r(a, b).ext == np.vdot([1 + 2j, 3], [0.5, -1j])


def test_inner_with_zero():
    a = make_vector(TAG, 4.0, [1, 2])
    assert inner_r(a, ScaledVector(TAG, 4.0, [0, 0])).ext == 0


def test_norm_examples():
    assert norm_r(ScaledVector(TAG, 2, [2, 0])) == 2
    assert norm_r(ScaledVector(TAG, 2, [0, 0])) == 0
    assert norm_r(make_vector(TAG, 3, [0.6, 0.8])) == pytest.approx(3.0, rel=1e-15)


def test_mismatches():
    a = make_vector(TAG, 2, [1, 2])
    with pytest.raises(CrossUniverseError):
        inner_r(a, make_vector(UniverseTag((9.0,)), 2, [1, 2]))
    with pytest.raises(ScaleMismatchError):
        a + make_vector(TAG, 3, [1, 2])
    with pytest.raises(DimensionMismatchError):
        inner_r(a, make_vector(TAG, 2, [1, 2, 3]))
    with pytest.raises(ScaleMismatchError):
        smul_r(make_scaled(TAG, 5, 1.0), a)


def test_vectors_are_immutable():
    v = make_vector(TAG, 2, [1, 2])
    with pytest.raises(ValueError):
        v.ext[0] = 5


@pytest.mark.parametrize("n,r", [(1, 0.7), (1, 5.0), (3, 2.0), (2, 1.0)])
def test_hilbert_iso(n, r, rng):
    report = hilbert_iso_check(n, r, 100, rng=rng)
    assert report.max_deviation <= 1e-10


@given(r=scales, pa=cvec(4), pb=cvec(4))
def test_scaled_cauchy_schwarz(r, pa, pb):
    a, b = make_vector(TAG, r, pa), make_vector(TAG, r, pb)
    lhs = r * abs(inner_r(a, b).ext)
    assert lhs <= norm_r(a) * norm_r(b) * (1 + 1e-12) + 1e-300


@given(r=scales, pa=cvec(5))
def test_norm_inner_consistency(r, pa):
    v = make_vector(TAG, r, pa)
    ip = inner_r(v, v).ext
    assert ip.imag == 0 and ip.real >= 0
    assert relative_deviation(norm_r(v) ** 2, r * ip.real) <= 1e-10


@given(r=scales, pa=cvec(3), pb=cvec(3))
def test_inner_homomorphism(r, pa, pb):
    a, b = make_vector(TAG, r, pa), make_vector(TAG, r, pb)
    scale = float(np.sum(np.abs(pa) * np.abs(pb)))
    assert relative_deviation(inner_r(a, b).value, complex(np.vdot(pa, pb)), scale) <= 1e-10
