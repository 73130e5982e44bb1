"""The scaling field theta, its gradient A, and the factors exp(theta(u) - theta(v)).

Fields are evaluated vectorised: ``theta.values(points)`` takes an ``(N, d)``
array. Only differences of theta enter any factor, so adding a constant to a
field never changes a result.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .charts import TaggedCoordinate, check_same_universe
from .errors import DimensionMismatchError, DomainError, ScaleOverflowError
from .reports import CheckReport

# exp() of anything beyond this is either inf or subnormal in double precision
MAX_LOG_FACTOR = 700.0
FD_REL_STEP = 1e-5


def _points(u, d: int) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != d:
        raise DimensionMismatchError(f"theta field of dimension {d} got points of shape {arr.shape}")
    return arr


class ThetaField:
    """Base class. Subclasses implement ``_eval`` and optionally ``_grad``.

    ``_domain`` returns a boolean mask of admissible points; the default admits
    every finite point.
    """

    preset = "custom"

    def __init__(self, d: int):
        if d < 1:
            raise DomainError("theta field dimension must be >= 1")
        self.d = int(d)

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _grad(self, pts: np.ndarray) -> np.ndarray | None:
        return None

    def _domain(self, pts: np.ndarray) -> np.ndarray:
        return np.ones(pts.shape[0], dtype=bool)

    @property
    def has_analytic_gradient(self) -> bool:
        return type(self)._grad is not ThetaField._grad

    def params(self) -> dict:
        return {}

    def _check_domain(self, pts: np.ndarray) -> None:
        finite = np.all(np.isfinite(pts), axis=1)
        ok = finite & self._domain(pts)
        if not np.all(ok):
            bad = pts[~ok][0]
            raise DomainError(
                f"point {bad.tolist()} is outside the domain of the {self.preset} theta field"
            )

    def values(self, points) -> np.ndarray:
        pts = _points(points, self.d)
        self._check_domain(pts)
        out = np.asarray(self._eval(pts), dtype=float)
        if not np.all(np.isfinite(out)):
            bad = pts[~np.isfinite(out)][0]
            raise DomainError(f"theta is not finite at {bad.tolist()}")
        return out

    def __call__(self, u) -> float:
        return float(self.values(u)[0])

    def fd_gradient(self, u) -> np.ndarray:
        """Central-difference gradient with step 1e-5 * max(1, |u_k|) per axis."""
        u = _points(u, self.d)[0]
        grad = np.empty(self.d)
        for k in range(self.d):
            h = FD_REL_STEP * max(1.0, abs(u[k]))
            e = np.zeros(self.d)
            e[k] = h
            fwd, bwd = self.values(np.stack([u + e, u - e]))
            grad[k] = (fwd - bwd) / (2 * h)
        return grad

    def gradient(self, u) -> np.ndarray:
        """The connection A = grad theta at ``u`` (analytic when available)."""
        pts = _points(u, self.d)
        self._check_domain(pts)
        g = self._grad(pts)
        if g is None:
            return self.fd_gradient(pts[0])
        g = np.asarray(g, dtype=float)[0]
        if not np.all(np.isfinite(g)):
            raise DomainError(f"theta gradient is not finite at {pts[0].tolist()}")
        return g

    def shifted(self, offset: float) -> ThetaField:
        return ShiftedTheta(self, offset)

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d}, {self.params()})"


class ConstantTheta(ThetaField):
    preset = "constant"

    def __init__(self, d: int, c: float = 0.0):
        super().__init__(d)
        self.c = float(c)

    def _eval(self, pts):
        return np.full(pts.shape[0], self.c)

    def _grad(self, pts):
        return np.zeros_like(pts)

    def params(self):
        return {"c": self.c}


class LinearTheta(ThetaField):
    """theta(u) = a . u + b"""

    preset = "linear"

    def __init__(self, a: Sequence[float], b: float = 0.0):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        super().__init__(a.shape[0])
        self.a = a
        self.b = float(b)

    def _eval(self, pts):
        return pts @ self.a + self.b

    def _grad(self, pts):
        return np.broadcast_to(self.a, pts.shape).copy()

    def params(self):
        return {"a": self.a.tolist(), "b": self.b}


class LogLinearTheta(ThetaField):
    """theta(u) = ln(1 + a . u), defined where 1 + a . u > 0."""

    preset = "log_linear"

    def __init__(self, a: Sequence[float]):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        super().__init__(a.shape[0])
        self.a = a

    def _domain(self, pts):
        return 1.0 + pts @ self.a > 0.0

    def _eval(self, pts):
        return np.log1p(pts @ self.a)

    def _grad(self, pts):
        return self.a[None, :] / (1.0 + pts @ self.a)[:, None]

    def params(self):
        return {"a": self.a.tolist()}


class GaussianBump(ThetaField):
    """theta(u) = height * exp(-|u - center|^2 / width^2)"""

    preset = "gaussian_bump"

    def __init__(self, center: Sequence[float], width: float = 1.0, height: float = 1.0):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        super().__init__(center.shape[0])
        if width <= 0:
            raise DomainError("gaussian bump width must be positive")
        self.center = center
        self.width = float(width)
        self.height = float(height)

    def _eval(self, pts):
        r2 = np.sum((pts - self.center) ** 2, axis=1)
        return self.height * np.exp(-r2 / self.width**2)

    def _grad(self, pts):
        diff = pts - self.center
        val = self._eval(pts)
        return (-2.0 / self.width**2) * val[:, None] * diff

    def params(self):
        return {"center": self.center.tolist(), "width": self.width, "height": self.height}


class InflationTheta(ThetaField):
    """Inflation-like profile in the time coordinate ``t = u[time_axis]``:

        theta = plateau * (1 - exp(-rate * t)) + ln(t / t0),   t > 0

    theta -> -inf as t -> 0+, rises steeply over ~1/rate and then grows only
    logarithmically. The spatial coordinates do not enter.
    """

    preset = "inflation"

    def __init__(
        self,
        d: int = 1,
        t0: float = 1.0,
        rate: float = 10.0,
        plateau: float = 20.0,
        time_axis: int = -1,
    ):
        super().__init__(d)
        if t0 <= 0 or rate <= 0:
            raise DomainError("inflation preset needs t0 > 0 and rate > 0")
        self.t0 = float(t0)
        self.rate = float(rate)
        self.plateau = float(plateau)
        self.time_axis = time_axis % self.d

    def _domain(self, pts):
        return pts[:, self.time_axis] > 0.0

    def _eval(self, pts):
        t = pts[:, self.time_axis]
        return self.plateau * -np.expm1(-self.rate * t) + np.log(t / self.t0)

    def _grad(self, pts):
        t = pts[:, self.time_axis]
        g = np.zeros_like(pts)
        g[:, self.time_axis] = self.plateau * self.rate * np.exp(-self.rate * t) + 1.0 / t
        return g

    def inflationary_part(self, t) -> np.ndarray:
        """exp(plateau * (1 - exp(-rate t))): the saturating part of exp(theta)."""
        t = np.asarray(t, dtype=float)
        return np.exp(self.plateau * -np.expm1(-self.rate * t))

    def params(self):
        return {
            "t0": self.t0,
            "rate": self.rate,
            "plateau": self.plateau,
            "time_axis": self.time_axis,
        }


class ShiftedTheta(ThetaField):
    """``base + offset``; physically indistinguishable from ``base``."""

    def __init__(self, base: ThetaField, offset: float):
        super().__init__(base.d)
        self.base = base
        self.offset = float(offset)
        self.preset = base.preset

    def _domain(self, pts):
        return self.base._domain(pts)

    def _eval(self, pts):
        return self.base._eval(pts) + self.offset

    def _grad(self, pts):
        return self.base._grad(pts)

    @property
    def has_analytic_gradient(self):
        return self.base.has_analytic_gradient

    def params(self):
        return {**self.base.params(), "offset": self.offset}


class CallableTheta(ThetaField):
    """Theta from a user closure over a single d-array. Library API only."""

    preset = "callable"

    def __init__(
        self,
        d: int,
        func: Callable[[np.ndarray], float],
        grad: Callable[[np.ndarray], np.ndarray] | None = None,
        domain: Callable[[np.ndarray], bool] | None = None,
    ):
        super().__init__(d)
        self.func = func
        self.grad_func = grad
        self.domain_func = domain

    def _domain(self, pts):
        if self.domain_func is None:
            return np.ones(pts.shape[0], dtype=bool)
        return np.array([bool(self.domain_func(p)) for p in pts])

    def _eval(self, pts):
        return np.array([float(self.func(p)) for p in pts])

    def _grad(self, pts):
        if self.grad_func is None:
            return None
        return np.array([np.asarray(self.grad_func(p), dtype=float) for p in pts])

    @property
    def has_analytic_gradient(self):
        return self.grad_func is not None


THETA_PRESETS = {
    "constant": lambda d, c=0.0: ConstantTheta(d, c),
    "linear": lambda d, a=None, b=0.0: LinearTheta([1.0] + [0.0] * (d - 1) if a is None else a, b),
    "log_linear": lambda d, a=None: LogLinearTheta([1.0] + [0.0] * (d - 1) if a is None else a),
    "gaussian_bump": lambda d, center=None, width=1.0, height=1.0: GaussianBump(
        [0.0] * d if center is None else center, width, height
    ),
    "inflation": lambda d, t0=1.0, rate=10.0, plateau=20.0, time_axis=-1: InflationTheta(
        d, t0, rate, plateau, time_axis
    ),
}


def make_theta(preset: str, d: int, offset: float = 0.0, **params) -> ThetaField:
    try:
        factory = THETA_PRESETS[preset]
    except KeyError:
        raise DomainError(
            f"unknown theta preset {preset!r}; choose from {sorted(THETA_PRESETS)}"
        ) from None
    field = factory(d, **params)
    if field.d != d:
        raise DimensionMismatchError(f"theta preset {preset!r} has dimension {field.d}, not {d}")
    return field.shifted(offset) if offset else field


def theta_at(field: ThetaField, c: TaggedCoordinate) -> float:
    return field(c.u)


def grad_theta(field: ThetaField, c: TaggedCoordinate) -> tuple[float, ...]:
    return tuple(field.gradient(c.u).tolist())


def factor_from_log(dtheta: float) -> float:
    if not abs(dtheta) <= MAX_LOG_FACTOR:
        raise ScaleOverflowError(f"scaling exponent {dtheta!r} exceeds +-{MAX_LOG_FACTOR}")
    return math.exp(dtheta)


def scale_factor(field: ThetaField, from_: TaggedCoordinate, to_ref: TaggedCoordinate) -> float:
    """exp(theta(from_) - theta(to_ref)); both coordinates must share a universe."""
    check_same_universe(from_.tag, to_ref.tag)
    pts = field.values(np.array([from_.u, to_ref.u], dtype=float))
    return factor_from_log(float(pts[0] - pts[1]))


def log_factors(field: ThetaField, points, ref_u) -> np.ndarray:
    """theta(points) - theta(ref) for an (N, d) array, guarded against overflow."""
    dtheta = field.values(points) - field(ref_u)
    worst = float(np.max(np.abs(dtheta))) if dtheta.size else 0.0
    if not worst <= MAX_LOG_FACTOR:
        raise ScaleOverflowError(f"scaling exponent reaches {worst:g} (> {MAX_LOG_FACTOR})")
    return dtheta


def gradient_check(
    field: ThetaField,
    points,
    tolerance: float = 1e-6,
) -> CheckReport:
    """Analytic gradient against central differences, max relative deviation."""
    pts = _points(points, field.d)
    worst = 0.0
    for p in pts:
        g = field.gradient(p)
        fd = field.fd_gradient(p)
        denom = max(float(np.linalg.norm(g)), float(np.linalg.norm(fd)))
        if denom > 0.0:
            worst = max(worst, float(np.linalg.norm(g - fd)) / denom)
    return CheckReport(
        name=f"theta_gradient[{field.preset}]",
        max_deviation=worst,
        tolerance=tolerance,
        samples=len(pts),
        details={"analytic": field.has_analytic_gradient},
    )
