"""Scaled calculus on a chart: integrals, wave packets, covariant derivatives.

Integrals over the whole coordinate system are truncated to the quadrature
box; callers are responsible for the integrand being negligible outside it.
Every integrand value at ``u`` is brought to the reference universe with the
single factor exp(theta(u) - theta(ref)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .charts import TaggedCoordinate, UniverseTag, check_same_universe
from .errors import DomainError, IntegrandError, ScaleOverflowError
from .linear import ScaledVector
from .numbers import ScaledScalar
from .quadrature import QuadratureSpec, exact_sum, grid
from .reports import CheckReport
from .theta import MAX_LOG_FACTOR, InflationTheta, ThetaField, log_factors, scale_factor


@dataclass(frozen=True)
class FieldOnChart:
    """A complex (or complex-vector) valued function on one universe's chart.

    ``func`` receives an ``(N, d)`` array of coordinates and returns ``(N,)`` or
    ``(N, n)`` values when ``vectorized``; otherwise it is called per point
    with a length-d array.
    """

    tag: UniverseTag
    func: Callable
    vectorized: bool = True
    name: str = "field"

    @property
    def d(self) -> int:
        return self.tag.dimension

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if self.vectorized:
            out = np.asarray(self.func(pts), dtype=complex)
        else:
            out = np.array([self.func(p) for p in pts], dtype=complex)
        if out.shape[0] != pts.shape[0]:
            out = np.broadcast_to(out, (pts.shape[0],) + out.shape[1:]).copy()
        if not np.all(np.isfinite(out)):
            raise IntegrandError(f"{self.name} is not finite somewhere on the grid")
        return out

    def at(self, u) -> np.ndarray:
        """Value at one point as a 1-D complex array (length 1 for scalars)."""
        return np.atleast_1d(self.evaluate(np.asarray(u, dtype=float))[0])


def const_field(tag: UniverseTag, c: complex = 1.0) -> FieldOnChart:
    return FieldOnChart(tag, lambda p: np.full(p.shape[0], c, dtype=complex), name="const")


def linear_field(tag: UniverseTag, a: Sequence[float] | None = None, b: complex = 0.0) -> FieldOnChart:
    a = np.eye(tag.dimension)[0] if a is None else np.asarray(a, dtype=float)
    return FieldOnChart(tag, lambda p: p @ a + b, name="linear")


def exp_field(tag: UniverseTag, k: Sequence[float] | None = None, amplitude: complex = 1.0) -> FieldOnChart:
    k = np.eye(tag.dimension)[0] if k is None else np.asarray(k, dtype=float)
    return FieldOnChart(tag, lambda p: amplitude * np.exp(p @ k), name="exp")


def gaussian_field(
    tag: UniverseTag,
    center: Sequence[float] | None = None,
    sigma: float = 1.0,
    amplitude: complex = 1.0,
    normalized: bool = False,
) -> FieldOnChart:
    """amplitude * exp(-|u - center|^2 / (2 sigma^2)), optionally L2-normalised."""
    d = tag.dimension
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    norm = (math.pi * sigma**2) ** (-d / 4) if normalized else 1.0

    def f(p):
        return amplitude * norm * np.exp(-np.sum((p - center) ** 2, axis=1) / (2 * sigma**2))

    return FieldOnChart(tag, f, name="gaussian")


def polynomial_field(tag: UniverseTag, coefficients: Sequence[complex], axis: int = 0) -> FieldOnChart:
    """sum_k coefficients[k] * u[axis]**k"""
    coeffs = np.asarray(coefficients, dtype=complex)
    return FieldOnChart(
        tag, lambda p: np.polynomial.polynomial.polyval(p[:, axis], coeffs), name="polynomial"
    )


def _check_ref(f: FieldOnChart, ref: TaggedCoordinate) -> None:
    check_same_universe(f.tag, ref.tag)
    if ref.dimension != f.d:
        raise DomainError(f"reference coordinate has dimension {ref.dimension}, chart has {f.d}")


def _check_box(f: FieldOnChart, q: QuadratureSpec) -> None:
    if q.d != f.d:
        raise DomainError(f"quadrature box has {q.d} axes, field lives in dimension {f.d}")


def local_integral(f: FieldOnChart, q: QuadratureSpec) -> ScaledScalar:
    """Unscaled integral of ``f`` over the box, in f's own universe (r = 1)."""
    _check_box(f, q)
    points, weights = grid(q)
    return ScaledScalar(f.tag, 1.0, exact_sum(weights * f.evaluate(points)))


def lifted_global_integral(
    f: FieldOnChart, theta: ThetaField, ref: TaggedCoordinate, q: QuadratureSpec
) -> ScaledScalar:
    """Integral of exp(theta(u) - theta(ref)) f(u) over the box.

    The whole integrand term is scaled once; with constant theta every factor
    is exactly exp(0) = 1 and the result equals ``local_integral`` bitwise.
    """
    _check_box(f, q)
    _check_ref(f, ref)
    points, weights = grid(q)
    factors = np.exp(log_factors(theta, points, ref.u))
    return ScaledScalar(f.tag, 1.0, exact_sum(weights * (factors * f.evaluate(points))))


def integral_error_estimate(
    f: FieldOnChart,
    q: QuadratureSpec,
    theta: ThetaField | None = None,
    ref: TaggedCoordinate | None = None,
) -> float:
    """Error of the integral at ``q`` estimated from one refinement.

    With I_n - I ~ C h^p, the error of I_n is |I_n - I_2n| / (1 - 2^-p).
    """
    if theta is None:
        coarse, fine = local_integral(f, q), local_integral(f, q.refined())
    else:
        coarse = lifted_global_integral(f, theta, ref, q)
        fine = lifted_global_integral(f, theta, ref, q.refined())
    return abs(coarse.ext - fine.ext) / (1.0 - 2.0**-q.order)


def integrand_dump(
    f: FieldOnChart, theta: ThetaField, ref: TaggedCoordinate, q: QuadratureSpec
) -> list[dict]:
    """One record per quadrature node: coordinates, integrand, factor, weight."""
    _check_box(f, q)
    _check_ref(f, ref)
    points, weights = grid(q)
    values = f.evaluate(points)
    factors = np.exp(log_factors(theta, points, ref.u))
    rows = []
    for p, v, fac, w in zip(points, values, factors, weights):
        row = {f"u{k}": float(x) for k, x in enumerate(p)}
        row.update(
            integrand_re=float(v.real),
            integrand_im=float(v.imag),
            factor=float(fac),
            weight=float(w),
        )
        rows.append(row)
    return rows


@dataclass(frozen=True)
class WavePacket:
    vector: ScaledVector
    points: np.ndarray
    cell_volume: float
    factors: np.ndarray
    norm2: float


def scaled_wave_packet(
    h: FieldOnChart, theta: ThetaField, ref: TaggedCoordinate, q: QuadratureSpec
) -> WavePacket:
    """Discretise the scaled position-basis packet on the cell midpoints of the box.

    Component i is exp(theta(u_i) - theta(ref)) psi(u_i) du and the squared
    norm is sum_i exp(2 (theta(u_i) - theta(ref))) |psi(u_i)|^2 du. The
    midpoint grid is used whatever ``q.rule`` says.
    """
    if h.d not in (1, 3):
        raise DomainError(f"wave packets are built on 1-D or 3-D charts, got d={h.d}")
    _check_box(h, q)
    _check_ref(h, ref)
    points, weights = grid(q, rule="midpoint")
    du = q.cell_volume()
    psi = h.evaluate(points)
    if psi.ndim != 1:
        raise DomainError("wave packet amplitude must be scalar valued")
    dtheta = log_factors(theta, points, ref.u)
    if np.max(np.abs(2 * dtheta)) > MAX_LOG_FACTOR:
        raise ScaleOverflowError("squared scaling factor overflows")
    factors = np.exp(dtheta)
    comps = factors * psi * du
    norm2 = exact_sum(np.exp(2 * dtheta) * np.abs(psi) ** 2 * weights).real
    return WavePacket(ScaledVector(ref.tag, 1.0, comps), points, du, factors, norm2)


@dataclass(frozen=True)
class GaugeLink:
    """Parallel transporter between neighbouring points.

    ``u1_phase`` uses a real phase field alpha(u) (one component per axis);
    the link over a step h along axis mu is exp(i alpha_mu(u) h).
    """

    kind: str = "identity"
    phase: Callable[[np.ndarray], Sequence[float]] | Sequence[float] | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "u1_phase"):
            raise DomainError(f"unsupported gauge link {self.kind!r}")
        if self.kind == "u1_phase" and self.phase is None:
            raise DomainError("u1_phase link needs a phase field")

    def alpha(self, u: np.ndarray, mu: int) -> float:
        if self.kind == "identity":
            return 0.0
        a = self.phase(u) if callable(self.phase) else self.phase
        return float(np.asarray(a, dtype=float)[mu])

    def value(self, u: np.ndarray, mu: int, h: float) -> complex:
        if self.kind == "identity":
            return 1.0 + 0.0j
        return cmath.exp(1j * self.alpha(u, mu) * h)


IDENTITY_LINK = GaugeLink()


def _forward_difference(psi, mu, u, theta, link, h):
    a_mu = float(theta.gradient(u)[mu])
    if abs(a_mu * h) > MAX_LOG_FACTOR:
        raise ScaleOverflowError(f"connection factor exp({a_mu * h:g}) overflows")
    step = u.copy()
    step[mu] += h
    here = psi.at(u)
    there = psi.at(step)
    transported = math.exp(a_mu * h) * link.value(u, mu, h) * there
    return (transported - here) / h


def covariant_derivative(
    psi: FieldOnChart,
    mu: int,
    at: TaggedCoordinate,
    theta: ThetaField,
    link: GaugeLink = IDENTITY_LINK,
    h: float = 1e-4,
    richardson: bool = True,
) -> np.ndarray:
    """Scaled covariant derivative of ``psi`` along axis ``mu`` at ``at``.

    The raw estimate is the forward difference
    [exp(A_mu(u) h) U(u, u + h) psi(u + h e_mu) - psi(u)] / h with A = grad theta.
    With ``richardson`` the reported value is 2 D(h/2) - D(h), which removes
    the O(h) error term.
    """
    check_same_universe(psi.tag, at.tag)
    if not h > 0:
        raise DomainError("step h must be positive")
    if not 0 <= mu < psi.d:
        raise DomainError(f"axis {mu} out of range for dimension {psi.d}")
    u = at.as_array()
    d_h = _forward_difference(psi, mu, u, theta, link, h)
    if not richardson:
        return d_h
    d_half = _forward_difference(psi, mu, u, theta, link, h / 2)
    return 2.0 * d_half - d_h


def partial_derivative(psi: FieldOnChart, mu: int, u: np.ndarray, h: float = 1e-3, levels: int = 4) -> np.ndarray:
    """Central differences refined by a Richardson table (even error powers)."""
    def central(step):
        e = np.zeros_like(u)
        e[mu] = step
        return (psi.at(u + e) - psi.at(u - e)) / (2 * step)

    table = [central(h / 2**k) for k in range(levels)]
    for j in range(1, levels):
        fac = 4.0**j
        table = [(fac * table[k + 1] - table[k]) / (fac - 1) for k in range(len(table) - 1)]
    return table[0]


def covariant_limit(
    psi: FieldOnChart,
    mu: int,
    at: TaggedCoordinate,
    theta: ThetaField,
    link: GaugeLink = IDENTITY_LINK,
) -> np.ndarray:
    """The h -> 0 limit d_mu psi + A_mu psi + i alpha_mu psi, from central differences."""
    u = at.as_array()
    a_mu = float(theta.gradient(u)[mu])
    here = psi.at(u)
    return partial_derivative(psi, mu, u) + (a_mu + 1j * link.alpha(u, mu)) * here


def loglog_slope(steps, deviations) -> float:
    """Least-squares slope of log(deviation) against log(step), zeros skipped."""
    steps = np.asarray(steps, dtype=float)
    dev = np.asarray(deviations, dtype=float)
    keep = dev > 0
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(steps[keep]), np.log(dev[keep]), 1)[0])


def covariant_consistency_check(
    psi: FieldOnChart,
    mu: int,
    at: TaggedCoordinate,
    theta: ThetaField,
    link: GaugeLink = IDENTITY_LINK,
    steps: Sequence[float] = (1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3, 3.125e-3),
    slope_target: float = 1.0,
    slope_tol: float = 0.1,
) -> CheckReport:
    """Fit the convergence order of the raw forward difference to its limit."""
    limit = covariant_limit(psi, mu, at, theta, link)
    devs = [
        float(np.linalg.norm(covariant_derivative(psi, mu, at, theta, link, h, richardson=False) - limit))
        for h in steps
    ]
    slope = loglog_slope(steps, devs)
    return CheckReport(
        name="covariant_consistency",
        max_deviation=abs(slope - slope_target) if math.isfinite(slope) else math.inf,
        tolerance=slope_tol,
        samples=len(steps),
        details={"slope": slope, "deviations": devs, "steps": list(steps)},
    )


def scaled_distance_element(
    ds2: float, theta: ThetaField, far: TaggedCoordinate, local: TaggedCoordinate
) -> float:
    """exp(theta(far) - theta(local)) * ds2, the far element seen from ``local``."""
    if not (ds2 > 0 and math.isfinite(ds2)):
        raise DomainError(f"ds2 must be a positive finite magnitude, got {ds2!r}")
    return scale_factor(theta, far, local) * ds2


def du_invariance_check(
    theta: ThetaField,
    at: TaggedCoordinate,
    steps: Sequence[float] = tuple(10.0 ** -k for k in np.arange(1.0, 3.01, 0.25)),
    axis: int = 0,
    min_slope: float = 0.9,
) -> CheckReport:
    """Scaled increment rho(h) = exp(theta(u + h) - theta(u)) * h / h against 1.

    Passes when rho is exactly 1 for every step or |rho - 1| shrinks at least
    linearly (fitted log-log slope >= ``min_slope``). The details also carry
    the endpoint-scaled ratio (exp(dtheta) (u + h) - u) / h for comparison.
    """
    steps = [float(h) for h in steps]
    if any(not h > 0 for h in steps):
        raise DomainError("steps must be positive")
    u = at.as_array()
    theta_u = theta(u)
    rho, literal = [], []
    for h in steps:
        v = u.copy()
        v[axis] += h
        dtheta = theta(v) - theta_u
        factor = math.exp(dtheta)
        rho.append(factor * h / h)
        literal.append((factor * v[axis] - u[axis]) / h)
    devs = [abs(x - 1.0) for x in rho]
    exact = all(dv == 0.0 for dv in devs)
    slope = math.inf if exact else loglog_slope(steps, devs)
    return CheckReport(
        name=f"du_invariance[{theta.preset}]",
        max_deviation=max(devs),
        tolerance=math.inf,
        samples=len(steps),
        details={
            "steps": steps,
            "rho": rho,
            "deviation": devs,
            "slope": slope,
            "exact": exact,
            "endpoint_scaled_ratio": literal,
        },
        verdict=exact or (math.isfinite(slope) and slope >= min_slope),
    )


def distance_table(
    theta: ThetaField,
    times: Sequence[float],
    present_age: float,
    ds2: float = 1.0,
    space_point: Sequence[float] | None = None,
) -> list[dict]:
    """Rows (t, theta(t), factor, scaled ds2) seen from the universe at (x, present_age).

    The time coordinate is the theta field's time axis for the inflation
    preset and the last axis otherwise.
    """
    d = theta.d
    axis = theta.time_axis if isinstance(theta, InflationTheta) else d - 1
    x = np.zeros(d) if space_point is None else np.asarray(space_point, dtype=float).copy()
    if x.shape[0] != d:
        raise DomainError(f"space point must be a full {d}-tuple (time component ignored)")
    for t in times:
        if not t > 0:
            raise DomainError(f"time grid must be strictly positive, got t={t!r}")
    here = x.copy()
    here[axis] = present_age
    tag = UniverseTag(tuple(here))
    local = TaggedCoordinate(tag, tuple(here))
    rows = []
    for t in times:
        p = x.copy()
        p[axis] = t
        far = TaggedCoordinate(tag, tuple(p))
        factor = scale_factor(theta, far, local)
        rows.append(
            {
                "t": float(t),
                "theta": theta(p),
                "factor": factor,
                "scaled_ds2": scaled_distance_element(ds2, theta, far, local),
            }
        )
    return rows
