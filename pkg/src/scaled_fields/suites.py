"""Invariant suites run by ``scaled-fields verify``.

Each suite returns a list of ``CheckReport``. The suites draw random samples
from the generator they are given, so a fixed seed reproduces a run exactly.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import calculus as calc
from .charts import (
    AffineChart,
    ChartFamily,
    IdentityChart,
    TaggedCoordinate,
    TanhChart,
    UniverseTag,
    same_chart_check,
)
from .errors import CrossUniverseError
from .linear import add_vec_r, hilbert_iso_check, inner_r, make_vector, norm_r, smul_r
from .maps import factorization_check, same_value_map, scaled_representation
from .numbers import (
    COS,
    EXP,
    SIN,
    AnalyticFn,
    ScaledScalar,
    add_r,
    apply_analytic_r,
    div_r,
    make_scaled,
    mul_r,
    one_r,
    relative_deviation,
    sub_r,
    zero_r,
)
from .quadrature import QuadratureSpec
from .reports import CheckReport
from .theta import ConstantTheta, LinearTheta, ThetaField, gradient_check, scale_factor

REL_TOL = 1e-10


def log_uniform(rng: np.random.Generator, lo: float, hi: float, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size=size))


def random_value(rng: np.random.Generator) -> complex:
    mag = log_uniform(rng, 1e-3, 1e3)
    return complex(rng.normal(), rng.normal()) * mag


def field_axioms(rng: np.random.Generator, samples: int = 1000) -> list[CheckReport]:
    """Field identities and the value homomorphism on random scaled scalars."""
    tag = UniverseTag((0.0,))
    axiom_dev = 0.0
    homo_dev = 0.0
    for _ in range(samples):
        r = float(log_uniform(rng, 1e-6, 1e6))
        a, b, c = (make_scaled(tag, r, random_value(rng)) for _ in range(3))
        zero, one = zero_r(tag, r), one_r(tag, r)
        A, B, C = abs(a.ext), abs(b.ext), abs(c.ext)
        checks = [
            (add_r(add_r(a, b), c).ext, add_r(a, add_r(b, c)).ext, A + B + C),
            (add_r(a, b).ext, add_r(b, a).ext, A + B),
            (mul_r(mul_r(a, b), c).ext, mul_r(a, mul_r(b, c)).ext, A * B * C / r**2),
            (mul_r(a, b).ext, mul_r(b, a).ext, A * B / r),
            (mul_r(a, add_r(b, c)).ext, add_r(mul_r(a, b), mul_r(a, c)).ext, A * (B + C) / r),
            (add_r(a, zero).ext, a.ext, A),
            (mul_r(one, a).ext, a.ext, A),
            (add_r(a, -a).ext, zero.ext, A),
            (mul_r(a, div_r(one, a)).ext, one.ext, r),
        ]
        for x, y, scale in checks:
            axiom_dev = max(axiom_dev, relative_deviation(x, y, scale))
        va, vb = a.value, b.value
        homo = [
            (add_r(a, b).value, va + vb, abs(va) + abs(vb)),
            (sub_r(a, b).value, va - vb, abs(va) + abs(vb)),
            (mul_r(a, b).value, va * vb, abs(va * vb)),
            (div_r(a, b).value, va / vb, abs(va / vb)),
        ]
        for x, y, scale in homo:
            homo_dev = max(homo_dev, relative_deviation(x, y, scale))
    return [
        CheckReport("field_axioms", axiom_dev, REL_TOL, samples),
        CheckReport("value_homomorphism", homo_dev, REL_TOL, samples),
    ]


def random_polynomial(rng: np.random.Generator, max_degree: int = 8) -> AnalyticFn:
    deg = int(rng.integers(0, max_degree + 1))
    coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    return AnalyticFn.polynomial(coeffs.tolist())


def analytic_deviation(f: AnalyticFn, a: ScaledScalar) -> float:
    got = apply_analytic_r(f, a).ext
    expected = a.r * complex(f(a.value))
    return relative_deviation(got, expected)


def analytic_correspondence(
    rng: np.random.Generator, polynomials: int = 100, points: int = 20
) -> list[CheckReport]:
    tag = UniverseTag((0.0,))
    reports = []
    for f in (EXP, SIN, COS):
        worst = 0.0
        for _ in range(points):
            r = float(log_uniform(rng, 1e-6, 1e6))
            a = make_scaled(tag, r, complex(rng.uniform(-3, 3), rng.uniform(-3, 3)))
            worst = max(worst, analytic_deviation(f, a))
        reports.append(CheckReport(f"analytic[{f.name}]", worst, REL_TOL, points))
    worst = 0.0
    for _ in range(polynomials):
        f = random_polynomial(rng)
        r = float(log_uniform(rng, 1e-6, 1e6))
        a = make_scaled(tag, r, complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))
        worst = max(worst, analytic_deviation(f, a))
    reports.append(CheckReport("analytic[polynomials]", worst, REL_TOL, polynomials))
    return reports


def hilbert_suite(rng: np.random.Generator, samples: int = 100) -> list[CheckReport]:
    return [
        hilbert_iso_check(n, r, samples, rng=rng)
        for n in (1, 2, 3, 8)
        for r in (0.5, 1.0, 3.0)
    ]


def linear_properties(rng: np.random.Generator, samples: int = 200) -> list[CheckReport]:
    """Cauchy-Schwarz, ||v||^2 = r <v, v>, and the inner-product homomorphism.

    Cauchy-Schwarz is checked in the scaled structure, where the product of
    the two norms is taken with the scaled multiplication (divided by r).
    """
    tag = UniverseTag((0.0,))
    cs_violation = 0.0
    norm_dev = 0.0
    homo_dev = 0.0
    for _ in range(samples):
        n = int(rng.integers(1, 9))
        r = float(log_uniform(rng, 1e-3, 1e3))
        pa = rng.normal(size=n) + 1j * rng.normal(size=n)
        pb = rng.normal(size=n) + 1j * rng.normal(size=n)
        a, b = make_vector(tag, r, pa), make_vector(tag, r, pb)
        ip = inner_r(a, b)
        bound = norm_r(a) * norm_r(b) / r
        cs_violation = max(cs_violation, max(0.0, abs(ip.ext) - bound) / bound)
        self_ip = inner_r(a, a).ext
        norm_dev = max(norm_dev, relative_deviation(norm_r(a) ** 2, r * self_ip))
        scale = float(np.sum(np.abs(pa) * np.abs(pb)))
        homo_dev = max(homo_dev, relative_deviation(ip.value, complex(np.vdot(pa, pb)), scale))
    return [
        CheckReport("cauchy_schwarz", cs_violation, 1e-12, samples),
        CheckReport("norm_inner_consistency", norm_dev, REL_TOL, samples),
        CheckReport("inner_homomorphism", homo_dev, REL_TOL, samples),
    ]


def preset_charts(d: int) -> list[ChartFamily]:
    rng = np.random.default_rng(12345)
    matrix = np.eye(d) + 0.3 * rng.normal(size=(d, d))
    return [
        IdentityChart(d),
        AffineChart(matrix, rng.normal(size=d)),
        TanhChart(d, scale=1.5),
    ]


def chart_suite(
    rng: np.random.Generator,
    d: int,
    extra: ChartFamily | None = None,
    samples: int = 1000,
) -> list[CheckReport]:
    charts = preset_charts(d) + ([extra] if extra is not None else [])
    tag_x = UniverseTag(tuple(rng.normal(size=d)))
    tag_y = UniverseTag(tuple(rng.normal(size=d)))
    reports = [
        same_chart_check(ch, tag_x, tag_y, samples, box=[(-3.0, 3.0)] * d, rng=rng)
        for ch in charts
    ]
    if extra is not None:
        reports[-1].name = reports[-1].name.replace("[", "[config:")
    return reports


def _box_interior(box, rng, n, shrink=0.1):
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    pad = shrink * (hi - lo)
    return rng.uniform(lo + pad, hi - pad, size=(n, box.shape[0]))


def theta_suite(
    rng: np.random.Generator, theta: ThetaField, box, samples: int = 100
) -> list[CheckReport]:
    """Cocycle, inverse pairs, offset invariance and the gradient check."""
    d = theta.d
    tag = UniverseTag((0.0,) * d)
    pts = _box_interior(box, rng, 3 * samples)
    shifted = theta.shifted(5.0)
    cocycle = inverse = offset = 0.0
    for i in range(samples):
        u, v, w = (TaggedCoordinate(tag, tuple(p)) for p in pts[3 * i : 3 * i + 3])
        cocycle = max(
            cocycle,
            relative_deviation(
                scale_factor(theta, u, w), scale_factor(theta, u, v) * scale_factor(theta, v, w)
            ),
        )
        inverse = max(inverse, abs(scale_factor(theta, u, v) * scale_factor(theta, v, u) - 1.0))
        offset = max(
            offset, relative_deviation(scale_factor(theta, u, v), scale_factor(shifted, u, v))
        )
    grad = gradient_check(theta, pts[:samples]) if theta.has_analytic_gradient else None
    reports = [
        CheckReport(f"theta_cocycle[{theta.preset}]", cocycle, 1e-12, samples),
        CheckReport(f"theta_inverse_pair[{theta.preset}]", inverse, 1e-12, samples),
        CheckReport(f"theta_offset_invariance[{theta.preset}]", offset, 1e-12, samples),
    ]
    if grad is not None:
        reports.append(grad)
    return reports


def maps_suite(rng: np.random.Generator, theta: ThetaField, box, samples: int = 100) -> list[CheckReport]:
    d = theta.d
    fact = factorization_check(theta, samples, box=box, rng=rng)
    tag = UniverseTag((0.0,) * d)
    other = UniverseTag((1.0,) * d)
    worst = 0.0
    bijective = True
    pts = _box_interior(box, rng, 2 * samples, shrink=0.0)
    for i in range(samples):
        at = TaggedCoordinate(tag, tuple(pts[2 * i]))
        ref = TaggedCoordinate(tag, tuple(pts[2 * i + 1]))
        s = make_scaled(tag, float(log_uniform(rng, 1e-3, 1e3)), random_value(rng))
        out = scaled_representation(s, theta, at, ref)
        worst = max(worst, relative_deviation(out.ext / out.r, s.ext / s.r))
        moved = same_value_map(same_value_map(s, other), tag)
        bijective &= moved == s
    return [
        fact,
        CheckReport("scaled_representation_value", worst, 1e-12, samples),
        CheckReport(
            "same_value_map_bijection", 0.0 if bijective else 1.0, 0.0, samples
        ),
    ]


def _closed_forms(tag: UniverseTag):
    return [
        (calc.FieldOnChart(tag, lambda p: 1.0 / (1.0 + p[:, 0]), name="inv1p"), math.log(2.0)),
        (calc.exp_field(tag), math.e - 1.0),
        (calc.FieldOnChart(tag, lambda p: np.cos(3 * p[:, 0]), name="cos3"), math.sin(3.0) / 3.0),
    ]


def quadrature_suite() -> list[CheckReport]:
    """Measured convergence order against closed forms on [0, 1]."""
    tag = UniverseTag((0.0,))
    reports = []
    for rule, order in (("trapezoid", 2), ("simpson", 4), ("midpoint", 2)):
        worst = 0.0
        for f, exact in _closed_forms(tag):
            errs = [
                abs(calc.local_integral(f, QuadratureSpec([(0.0, 1.0)], n, rule)).ext - exact)
                for n in (8, 16)
            ]
            ratio = errs[0] / errs[1]
            worst = max(worst, abs(ratio / 2**order - 1.0))
        reports.append(CheckReport(f"quadrature_order[{rule}]", worst, 0.3, 3))
    return reports


def lifted_suite(
    rng: np.random.Generator,
    theta: ThetaField,
    q: QuadratureSpec,
    field_factory: Callable[[UniverseTag], calc.FieldOnChart],
    reference,
    samples: int = 50,
) -> list[CheckReport]:
    """Scaling neutrality, reference covariance and the single-factor rule."""
    d = theta.d
    tag = UniverseTag(tuple(float(x) for x in reference))
    f = field_factory(tag)
    ref = TaggedCoordinate(tag, tuple(reference))
    flat = ConstantTheta(d, 0.37)
    neutral = calc.lifted_global_integral(f, flat, ref, q).ext == calc.local_integral(f, q).ext
    cov = 0.0
    pts = _box_interior(q.box, rng, 2 * samples, shrink=0.0)
    for i in range(samples):
        v1 = TaggedCoordinate(tag, tuple(pts[2 * i]))
        v2 = TaggedCoordinate(tag, tuple(pts[2 * i + 1]))
        i1 = calc.lifted_global_integral(f, theta, v1, q).ext
        i2 = calc.lifted_global_integral(f, theta, v2, q).ext
        cov = max(cov, relative_deviation(i1, scale_factor(theta, v2, v1) * i2))
    return [
        CheckReport("scaling_neutrality", 0.0 if neutral else 1.0, 0.0, 1),
        CheckReport("reference_covariance", cov, REL_TOL, samples),
    ]


def derivative_suite(theta: ThetaField, at_point) -> list[CheckReport]:
    """Covariantly constant field and the first-order consistency of D."""
    d = theta.d
    tag = UniverseTag(tuple(float(x) for x in at_point))
    at = TaggedCoordinate(tag, tuple(at_point))
    c = 0.5 - 0.25j
    theta_at_point = theta(at_point)
    # normalised so |psi(at)| = |c|
    psi = calc.FieldOnChart(
        tag, lambda p: c * np.exp(-(theta.values(p) - theta_at_point)), name="cov_const"
    )
    reports = []
    for mu in range(d):
        dpsi = calc.covariant_derivative(psi, mu, at, theta, h=1e-6)
        reports.append(
            CheckReport(f"covariantly_constant[axis={mu}]", float(np.linalg.norm(dpsi)), 1e-6, 1)
        )
    probe = calc.FieldOnChart(
        tag, lambda p: np.sin(p.sum(axis=1)) + 2.0 + 0.5j * p[:, 0], name="probe"
    )
    reports.append(calc.covariant_consistency_check(probe, 0, at, theta))
    return reports


def du_suite(theta: ThetaField, at_point) -> list[CheckReport]:
    tag = UniverseTag(tuple(float(x) for x in at_point))
    return [calc.du_invariance_check(theta, TaggedCoordinate(tag, tuple(at_point)))]


def wave_packet_suite(rng: np.random.Generator) -> list[CheckReport]:
    """Uniform theta offset relative to ref multiplies norm^2 by exp(2 dtheta).

    With linear theta of slope k, moving the reference by -delta/k lowers
    theta(ref) by delta, i.e. raises every theta(u) - theta(ref) by delta.
    """
    slope = 0.2
    theta = LinearTheta([slope])
    tag = UniverseTag((0.0,))
    q = QuadratureSpec([(-8.0, 8.0)], 400, "midpoint")
    psi = calc.gaussian_field(tag, [0.3], 0.8, normalized=True)
    base = calc.scaled_wave_packet(psi, theta, TaggedCoordinate(tag, (0.0,)), q)
    worst = 0.0
    for _ in range(5):
        delta = float(rng.uniform(-2.0, 2.0))
        moved = calc.scaled_wave_packet(psi, theta, TaggedCoordinate(tag, (-delta / slope,)), q)
        worst = max(worst, relative_deviation(moved.norm2, math.exp(2 * delta) * base.norm2))
    return [CheckReport("wave_packet_uniform_scaling", worst, REL_TOL, 5)]


def cross_universe_suite(rng: np.random.Generator, attempts: int = 100) -> list[CheckReport]:
    """Every mixed-tag operation must raise CrossUniverseError."""
    raised = 0
    total = 0
    ops = _mixed_tag_ops()
    for i in range(attempts):
        x, y = rng.normal(size=(2, 2))
        tx, ty = UniverseTag(tuple(x)), UniverseTag(tuple(y))
        op = ops[i % len(ops)]
        total += 1
        try:
            op(tx, ty, rng)
        except CrossUniverseError:
            raised += 1
        except Exception:
            pass
    return [
        CheckReport(
            "cross_universe_guard",
            1.0 - raised / total,
            0.0,
            total,
            details={"raised": raised, "attempted": total},
        )
    ]


def _mixed_tag_ops():
    def scalars(tx, ty, rng):
        r = float(log_uniform(rng, 1e-3, 1e3))
        return make_scaled(tx, r, random_value(rng)), make_scaled(ty, r, random_value(rng))

    def vectors(tx, ty, rng):
        r = float(log_uniform(rng, 1e-3, 1e3))
        return make_vector(tx, r, rng.normal(size=3)), make_vector(ty, r, rng.normal(size=3))

    def integral(tx, ty, rng):
        f = calc.const_field(tx)
        calc.lifted_global_integral(
            f, LinearTheta([1.0, 0.0]), TaggedCoordinate(ty, (0.0, 0.0)),
            QuadratureSpec([(0, 1), (0, 1)], 4),
        )

    return [
        lambda tx, ty, rng: add_r(*scalars(tx, ty, rng)),
        lambda tx, ty, rng: sub_r(*scalars(tx, ty, rng)),
        lambda tx, ty, rng: mul_r(*scalars(tx, ty, rng)),
        lambda tx, ty, rng: div_r(*scalars(tx, ty, rng)),
        lambda tx, ty, rng: scalars(tx, ty, rng)[0] + scalars(tx, ty, rng)[1],
        lambda tx, ty, rng: add_vec_r(*vectors(tx, ty, rng)),
        lambda tx, ty, rng: inner_r(*vectors(tx, ty, rng)),
        lambda tx, ty, rng: smul_r(scalars(tx, ty, rng)[0], vectors(tx, ty, rng)[1]),
        lambda tx, ty, rng: TaggedCoordinate(tx, (1.0, 2.0)) - TaggedCoordinate(ty, (0.5, 0.5)),
        lambda tx, ty, rng: TaggedCoordinate(tx, (1.0, 2.0)) + TaggedCoordinate(ty, (0.5, 0.5)),
        lambda tx, ty, rng: scale_factor(
            LinearTheta([1.0, 0.0]), TaggedCoordinate(tx, (0.0, 0.0)), TaggedCoordinate(ty, (1.0, 0.0))
        ),
        integral,
    ]
