"""Flat manifold points, universe tags, and same-chart coordinate families.

M is handled through one fixed reference parameterization: an M-point is a
d-tuple of floats in that parameterization, and every chart is a map on it.
A chart family is a single numeric map shared by all universes; what differs
between universes is only the tag attached to the resulting coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ChartRangeError, CrossUniverseError, DimensionMismatchError, DomainError
from .reports import CheckReport

MAX_DIMENSION = 4
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50


def _as_point(p, d: int | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatchError(f"expected a flat d-tuple, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise DimensionMismatchError(f"expected dimension {d}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite point {arr.tolist()}")
    return arr


@dataclass(frozen=True)
class UniverseTag:
    """Identifies the local universe attached to one point of M.

    Two tags are equal iff they are bound to the same point.
    """

    point: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(float(v) for v in self.point))

    @classmethod
    def at(cls, *coords: float) -> UniverseTag:
        return cls(tuple(coords))

    @property
    def dimension(self) -> int:
        return len(self.point)


def check_same_universe(*tags: UniverseTag) -> UniverseTag:
    first = tags[0]
    for t in tags[1:]:
        if t != first:
            raise CrossUniverseError(
                f"values from universes at {first.point} and {t.point} cannot be combined "
                "without an explicit structure map"
            )
    return first


@dataclass(frozen=True)
class TaggedCoordinate:
    """A location u_x on the coordinate system of universe ``tag``."""

    tag: UniverseTag
    u: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(v) for v in self.u))

    @property
    def dimension(self) -> int:
        return len(self.u)

    def as_array(self) -> np.ndarray:
        return np.array(self.u, dtype=float)

    def _check(self, other) -> None:
        if not isinstance(other, TaggedCoordinate):
            raise TypeError(f"cannot combine TaggedCoordinate with {type(other).__name__}")
        check_same_universe(self.tag, other.tag)
        if other.dimension != self.dimension:
            raise DimensionMismatchError(f"dimension {self.dimension} vs {other.dimension}")

    def __add__(self, other: TaggedCoordinate) -> TaggedCoordinate:
        self._check(other)
        return TaggedCoordinate(self.tag, tuple(a + b for a, b in zip(self.u, other.u)))

    def __sub__(self, other: TaggedCoordinate) -> TaggedCoordinate:
        self._check(other)
        return TaggedCoordinate(self.tag, tuple(a - b for a, b in zip(self.u, other.u)))

    def shifted(self, axis: int, step: float) -> TaggedCoordinate:
        u = list(self.u)
        u[axis] += step
        return TaggedCoordinate(self.tag, tuple(u))


class ChartFamily:
    """An invertible smooth map from M-points to d-tuples, shared by all universes.

    Subclasses provide ``forward`` and usually a closed-form ``inverse``; the
    default inverse runs Newton's method on ``forward`` with ``jacobian``.
    """

    name = "chart"

    def __init__(self, d: int):
        if not 1 <= int(d) <= MAX_DIMENSION:
            raise DomainError(f"chart dimension must be in 1..{MAX_DIMENSION}, got {d}")
        self.d = int(d)

    def forward(self, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        # central differences; presets override with exact Jacobians
        h = 1e-6 * np.maximum(1.0, np.abs(p))
        jac = np.empty((self.d, self.d))
        for k in range(self.d):
            e = np.zeros(self.d)
            e[k] = h[k]
            jac[:, k] = (self.forward(p + e) - self.forward(p - e)) / (2 * h[k])
        return jac

    def in_range(self, u: np.ndarray) -> bool:
        return bool(np.all(np.isfinite(u)))

    def inverse(self, u: np.ndarray) -> np.ndarray:
        if not self.in_range(u):
            raise ChartRangeError(f"{u.tolist()} is outside the range of the {self.name} chart")
        p = np.array(u, dtype=float)
        for _ in range(NEWTON_MAX_ITER):
            resid = self.forward(p) - u
            if np.max(np.abs(resid)) <= NEWTON_TOL * max(1.0, float(np.max(np.abs(u)))):
                return p
            p = p - np.linalg.solve(self.jacobian(p), resid)
        raise ChartRangeError(
            f"Newton inversion of the {self.name} chart did not converge at {u.tolist()}"
        )

    def params(self) -> dict:
        return {}

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d})"


class IdentityChart(ChartFamily):
    name = "identity"

    def forward(self, p):
        return np.array(p, dtype=float)

    def jacobian(self, p):
        return np.eye(self.d)

    def inverse(self, u):
        if not self.in_range(u):
            raise ChartRangeError(f"{u.tolist()} is outside the range of the identity chart")
        return np.array(u, dtype=float)


class AffineChart(ChartFamily):
    """u = A p + b with A invertible."""

    name = "affine"

    def __init__(self, matrix, offset=None):
        A = np.atleast_2d(np.asarray(matrix, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatchError(f"affine chart matrix must be square, got {A.shape}")
        super().__init__(A.shape[0])
        b = np.zeros(self.d) if offset is None else _as_point(offset, self.d)
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > 1e12:
            raise DomainError("affine chart matrix is singular or too ill-conditioned")
        self.matrix = A
        self.offset = b
        self._inv = np.linalg.inv(A)

    def forward(self, p):
        return self.matrix @ p + self.offset

    def jacobian(self, p):
        return self.matrix.copy()

    def inverse(self, u):
        if not self.in_range(u):
            raise ChartRangeError(f"{u.tolist()} is outside the range of the affine chart")
        p = self._inv @ (u - self.offset)
        # one residual correction step
        return p - self._inv @ (self.forward(p) - u)

    def params(self):
        return {"matrix": self.matrix.tolist(), "offset": self.offset.tolist()}


class TanhChart(ChartFamily):
    """Componentwise warp u_i = tanh(p_i / scale_i) onto the open cube (-1, 1)^d.

    Near |u| = 1 the inverse is ill-conditioned (dp/du = scale / (1 - u^2)), so
    coordinates with 1 - |u_i| below ``edge`` are rejected as out of range.
    """

    name = "tanh"

    def __init__(self, d: int, scale=1.0, edge: float = 1e-10):
        super().__init__(d)
        self.scale = np.broadcast_to(np.asarray(scale, dtype=float), (self.d,)).copy()
        if np.any(self.scale <= 0):
            raise DomainError("tanh chart scales must be positive")
        self.edge = float(edge)

    def forward(self, p):
        return np.tanh(p / self.scale)

    def jacobian(self, p):
        return np.diag((1.0 - np.tanh(p / self.scale) ** 2) / self.scale)

    def in_range(self, u):
        return bool(np.all(np.isfinite(u)) and np.all(1.0 - np.abs(u) >= self.edge))

    def inverse(self, u):
        if not self.in_range(u):
            raise ChartRangeError(f"{u.tolist()} is outside the numeric range of the tanh chart")
        return self.scale * np.arctanh(u)

    def params(self):
        return {"scale": self.scale.tolist(), "edge": self.edge}


class CallableChart(ChartFamily):
    """Chart from user-supplied maps; the inverse falls back to Newton when absent."""

    name = "callable"

    def __init__(
        self,
        d: int,
        forward: Callable[[np.ndarray], np.ndarray],
        inverse: Callable[[np.ndarray], np.ndarray] | None = None,
        jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
    ):
        super().__init__(d)
        self._forward = forward
        self._inverse = inverse
        self._jacobian = jacobian

    def forward(self, p):
        return np.asarray(self._forward(p), dtype=float)

    def jacobian(self, p):
        if self._jacobian is None:
            return super().jacobian(p)
        return np.asarray(self._jacobian(p), dtype=float)

    def inverse(self, u):
        if self._inverse is None:
            return super().inverse(u)
        return np.asarray(self._inverse(u), dtype=float)


CHART_PRESETS = {
    "identity": lambda d, **kw: IdentityChart(d),
    "affine": lambda d, matrix=None, offset=None: AffineChart(
        np.eye(d) if matrix is None else matrix, offset
    ),
    "tanh": lambda d, scale=1.0, edge=1e-10: TanhChart(d, scale, edge),
}


def make_chart(preset: str, d: int, **params) -> ChartFamily:
    try:
        factory = CHART_PRESETS[preset]
    except KeyError:
        raise DomainError(
            f"unknown chart preset {preset!r}; choose from {sorted(CHART_PRESETS)}"
        ) from None
    chart = factory(d, **params)
    if chart.d != d:
        raise DimensionMismatchError(f"chart preset {preset!r} has dimension {chart.d}, not {d}")
    return chart


def chart_apply(family: ChartFamily, tag: UniverseTag, p: Sequence[float]) -> TaggedCoordinate:
    u = family.forward(_as_point(p, family.d))
    return TaggedCoordinate(tag, tuple(u.tolist()))


def chart_invert(family: ChartFamily, c: TaggedCoordinate) -> np.ndarray:
    """Return the M-point whose coordinate is ``c.u``."""
    u = np.array(c.u, dtype=float)
    if u.shape[0] != family.d:
        raise DimensionMismatchError(f"expected dimension {family.d}, got {u.shape[0]}")
    return family.inverse(u)


def transport_point(c: TaggedCoordinate, to: UniverseTag) -> TaggedCoordinate:
    """Value-preserving map of a coordinate tuple into another universe."""
    return TaggedCoordinate(to, c.u)


def sample_points(family: ChartFamily, box, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform M-points in a box given as ``[(lo, hi), ...]`` per axis."""
    box = np.asarray(box, dtype=float).reshape(family.d, 2)
    return rng.uniform(box[:, 0], box[:, 1], size=(n, family.d))


def same_chart_check(
    family: ChartFamily,
    tag_x: UniverseTag,
    tag_y: UniverseTag,
    samples: int = 100,
    *,
    box=None,
    rng: np.random.Generator | None = None,
    tolerance: float = 1e-8,
) -> CheckReport:
    """Check phi_x(phi_y^-1(u_y)) == u_y and the M round trip on random samples.

    The reported deviation is the larger of the cross-tag deviation in
    coordinates and the M-point round-trip deviation.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    if box is None:
        box = [(-2.0, 2.0)] * family.d
    worst_cross = 0.0
    worst_round = 0.0
    for p in sample_points(family, box, samples, rng):
        c_y = chart_apply(family, tag_y, p)
        p_back = chart_invert(family, c_y)
        c_x = chart_apply(family, tag_x, p_back)
        transported = transport_point(c_y, tag_x)
        cross = max(abs(a - b) for a, b in zip(c_x.u, transported.u))
        worst_cross = max(worst_cross, cross)
        worst_round = max(worst_round, float(np.max(np.abs(p_back - p))))
    dev = max(worst_cross, worst_round)
    return CheckReport(
        name=f"chart_sameness[{family.name}]",
        max_deviation=dev,
        tolerance=tolerance,
        samples=samples,
        details={"cross_tag": worst_cross, "round_trip": worst_round},
    )
