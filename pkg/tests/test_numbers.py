import cmath
import math


import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from scaled_fields import (
    COS,
    EXP,
    IDENTITY,
    SIN,
    AnalyticFn,
    CrossUniverseError,
    DomainError,
    ScaledArithmeticError,
    ScaledScalar,
    ScaleMismatchError,
    UniverseTag,
    add_r,
    apply_analytic_r,
    div_r,
    make_scaled,
    mul_r,
    one_r,
    sub_r,
    zero_r,
)
from scaled_fields.numbers import relative_deviation

TAG = UniverseTag((0.0,))
OTHER = UniverseTag((1.0,))

scales = st.floats(-6 * math.log(10), 6 * math.log(10)).map(math.exp)
parts = st.floats(-1e3, 1e3).map(lambda x: x if abs(x) >= 1e-100 else 0.0)
complexes = st.builds(complex, parts, parts)


def close(x, y, scale=0.0, tol=1e-10):
    return relative_deviation(x, y, scale) <= tol


class TestMakeScaled:
    def test_unit_scale_is_identity(self):
        assert make_scaled(TAG, 1, 3 + 4j).ext == 3 + 4j

    def test_identity_constant(self):
        s = make_scaled(TAG, 5, 1)
        assert s.ext == 5
        assert s == one_r(TAG, 5, kind="real")

    def test_value_round_trip(self):
        s = make_scaled(TAG, 2, 3)
        assert s.ext == 6
        assert s.value == 3

    @pytest.mark.parametrize("r", [0.0, -1.0, math.inf, math.nan])
    def test_bad_scale(self, r):
        with pytest.raises(DomainError):
            make_scaled(TAG, r, 1.0)

    def test_real_kind_rejects_imaginary(self):
        with pytest.raises(DomainError):
            ScaledScalar(TAG, 1.0, 1j, "real")


class TestArithmetic:
    def test_add_example(self):
        a, b = ScaledScalar(TAG, 2, 6), ScaledScalar(TAG, 2, 4)
        out = add_r(a, b)
        assert out.ext == 10
        assert out.value == a.value + b.value == 5

    def test_add_zero(self):
        a = make_scaled(TAG, 3.5, 2 - 1j)
        assert add_r(a, zero_r(TAG, 3.5)) == a

    def test_mul_identity(self):
        a = ScaledScalar(TAG, 5, 10)
        assert mul_r(one_r(TAG, 5), a).ext == 10

    def test_mul_example(self):
        out = mul_r(ScaledScalar(TAG, 2, 6), ScaledScalar(TAG, 2, 4))
        assert out.ext == 12
        assert out.value == 3 * 2

    def test_div_example(self):
        out = div_r(ScaledScalar(TAG, 2, 12), ScaledScalar(TAG, 2, 4))
        assert out.ext == 6
        assert out.value == 6 / 2

    def test_div_by_identity(self):
        a = make_scaled(TAG, 7.0, 1.5 + 2j)
        assert div_r(a, one_r(TAG, 7.0)) == a

    def test_div_by_zero(self):
        with pytest.raises(ScaledArithmeticError):
            div_r(make_scaled(TAG, 2, 1), zero_r(TAG, 2))

    @given(complexes, complexes)
    def test_unit_scale_collapses(self, x, y):
        a, b = ScaledScalar(TAG, 1, x), ScaledScalar(TAG, 1, y)
        assert add_r(a, b).ext == x + y
        assert sub_r(a, b).ext == x - y
        assert mul_r(a, b).ext == x * y
        if y != 0:
            assert div_r(a, b).ext == x / y

    def test_operators_delegate(self):
        a, b = make_scaled(TAG, 3, 2.0), make_scaled(TAG, 3, 5.0)
        assert a + b == add_r(a, b)
        assert a * b == mul_r(a, b)
        assert a / b == div_r(a, b)
        assert a - b == sub_r(a, b)

    def test_no_coercion_with_plain_numbers(self):
        with pytest.raises(TypeError):
            make_scaled(TAG, 3, 2.0) + 1.0

    def test_cross_universe(self):
        with pytest.raises(CrossUniverseError):
            add_r(make_scaled(TAG, 2, 1), make_scaled(OTHER, 2, 1))

    def test_scale_mismatch(self):
        with pytest.raises(ScaleMismatchError):
            mul_r(make_scaled(TAG, 2, 1), make_scaled(TAG, 3, 1))


class TestHomomorphism:
    @given(scales, complexes, complexes)
    def test_value_homomorphism(self, r, x, y):
        a, b = make_scaled(TAG, r, x), make_scaled(TAG, r, y)
        assert close(add_r(a, b).value, x + y, abs(x) + abs(y))
        assert close(sub_r(a, b).value, x - y, abs(x) + abs(y))
        assert close(mul_r(a, b).value, x * y)
        assume(abs(y) > 1e-3)
        assert close(div_r(a, b).value, x / y)

    @given(scales, complexes, complexes, complexes)
    def test_field_axioms(self, r, x, y, z):
        a, b, c = (make_scaled(TAG, r, v) for v in (x, y, z))
        A, B, C = (abs(s.ext) for s in (a, b, c))
        assert close(((a + b) + c).ext, (a + (b + c)).ext, A + B + C)
        assert close(((a * b) * c).ext, (a * (b * c)).ext, A * B * C / r**2)
        assert close((a * b).ext, (b * a).ext)
        assert close((a * (b + c)).ext, (a * b + a * c).ext, A * (B + C) / r)
        assert (a + (-a)).ext == 0
        assume(abs(x) > 1e-6)
        assert close((a * (one_r(TAG, r) / a)).ext, r)


class TestAnalytic:
    def test_exp_of_zero_is_identity(self):
        out = apply_analytic_r(EXP, zero_r(TAG, 2.0, kind="real"))
        assert out.ext == 2.0
        assert out == one_r(TAG, 2.0, kind="real")

    def test_identity_function(self):
        a = make_scaled(TAG, 4.0, 1 + 1j)
        assert apply_analytic_r(IDENTITY, a) is a

    def test_square(self):
        square = AnalyticFn.polynomial([0, 0, 1])
        out = apply_analytic_r(square, ScaledScalar(TAG, 3, 6, "real"))
        assert out.ext == pytest.approx(12)
        assert out.value == pytest.approx(4)

    def test_domain_error(self):
        recip = AnalyticFn.from_callable(lambda z: 1 / z, "recip", domain=lambda z: z != 0)
        with pytest.raises(ScaledArithmeticError):
            apply_analytic_r(recip, zero_r(TAG, 2.0))

    def test_real_structure_is_closed(self):
        sqrt = AnalyticFn.from_callable(cmath.sqrt, "sqrt")
        with pytest.raises(ScaledArithmeticError):
            apply_analytic_r(sqrt, make_scaled(TAG, 2.0, -4.0))

    @pytest.mark.parametrize("f", [EXP, SIN, COS])
    @given(r=scales, x=st.floats(-3, 3), y=st.floats(-3, 3))
    def test_builtin_correspondence(self, f, r, x, y):
        a = make_scaled(TAG, r, complex(x, y))
        assert close(apply_analytic_r(f, a).ext, r * f(complex(x, y)))

    @given(
        r=scales,
        coeffs=st.lists(complexes, min_size=1, max_size=9),
        x=st.floats(-2, 2),
        y=st.floats(-2, 2),
    )
    def test_polynomial_correspondence(self, r, coeffs, x, y):
        z = complex(x, y)
        f = AnalyticFn.polynomial(coeffs)
        # independent evaluation: explicit power sum
        expected = sum(c * z**k for k, c in enumerate(coeffs))
        scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(coeffs))
        got = apply_analytic_r(f, make_scaled(TAG, r, z)).ext
        assert close(got, r * expected, r * scale)
