"""Scaled finite-dimensional vector and Hilbert spaces.

Vectors are stored as ``ext = r * psi``. Scalar multiplication is
``c.ext * v.ext / r`` and the inner product is ``<a.ext, b.ext> / r``, which is
the external representation (in the same scaled structure) of the unscaled
inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import UniverseTag, check_same_universe
from .errors import DimensionMismatchError, DomainError, ScaleMismatchError
from .numbers import ScaledScalar, add_r, check_scaling_factor, make_scaled, mul_r, zero_r
from .reports import CheckReport


@dataclass(frozen=True, eq=False)
class ScaledVector:
    tag: UniverseTag
    r: float
    ext: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", check_scaling_factor(self.r))
        ext = np.array(self.ext, dtype=complex).reshape(-1)
        if ext.size == 0:
            raise DimensionMismatchError("a scaled vector needs dimension >= 1")
        if not np.all(np.isfinite(ext)):
            raise DomainError("vector components must be finite")
        ext.flags.writeable = False
        object.__setattr__(self, "ext", ext)

    @property
    def n(self) -> int:
        return self.ext.shape[0]

    @property
    def value(self) -> np.ndarray:
        return self.ext / self.r

    def __eq__(self, other):
        if not isinstance(other, ScaledVector):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.r == other.r
            and self.n == other.n
            and bool(np.array_equal(self.ext, other.ext))
        )

    __hash__ = None

    def __add__(self, other):
        return add_vec_r(self, other)

    def __sub__(self, other):
        _check_vectors(self, other)
        return ScaledVector(self.tag, self.r, self.ext - other.ext)

    def __neg__(self):
        return ScaledVector(self.tag, self.r, -self.ext)

    def component(self, i: int) -> ScaledScalar:
        """The i-th coordinate as an element of the scaled complex structure."""
        return ScaledScalar(self.tag, self.r, complex(self.ext[i]), "complex")


def make_vector(tag: UniverseTag, r, psi) -> ScaledVector:
    """Scaled vector with intrinsic components ``psi``; stores ``r * psi``."""
    r = check_scaling_factor(r)
    return ScaledVector(tag, r, r * np.asarray(psi, dtype=complex))


def _check_vectors(a: ScaledVector, b: ScaledVector) -> None:
    check_same_universe(a.tag, b.tag)
    if a.r != b.r:
        raise ScaleMismatchError(f"scaling factors differ ({a.r!r} vs {b.r!r})")
    if a.n != b.n:
        raise DimensionMismatchError(f"dimension {a.n} vs {b.n}")


def add_vec_r(a: ScaledVector, b: ScaledVector) -> ScaledVector:
    _check_vectors(a, b)
    return ScaledVector(a.tag, a.r, a.ext + b.ext)


def smul_r(c: ScaledScalar, v: ScaledVector) -> ScaledVector:
    check_same_universe(c.tag, v.tag)
    if c.r != v.r:
        raise ScaleMismatchError(f"scaling factors differ ({c.r!r} vs {v.r!r})")
    return ScaledVector(v.tag, v.r, c.ext * v.ext / v.r)


def inner_r(a: ScaledVector, b: ScaledVector) -> ScaledScalar:
    """Inner product, conjugate-linear in the first argument."""
    _check_vectors(a, b)
    return ScaledScalar(a.tag, a.r, complex(np.vdot(a.ext, b.ext)) / a.r, "complex")


def norm_r(v: ScaledVector) -> float:
    """Euclidean norm of the external representation, i.e. ``r * ||psi||``."""
    return float(np.linalg.norm(v.ext))


def _componentwise_smul(c: ScaledScalar, v: ScaledVector) -> np.ndarray:
    return np.array([mul_r(c, v.component(i)).ext for i in range(v.n)])


def _componentwise_add(a: ScaledVector, b: ScaledVector) -> np.ndarray:
    return np.array([add_r(a.component(i), b.component(i)).ext for i in range(a.n)])


def _componentwise_inner(a: ScaledVector, b: ScaledVector) -> complex:
    acc = zero_r(a.tag, a.r)
    for i in range(a.n):
        acc = add_r(acc, mul_r(a.component(i).conjugate(), b.component(i)))
    return acc.ext


def hilbert_iso_check(
    n: int,
    r,
    samples: int = 100,
    *,
    rng: np.random.Generator | None = None,
    tolerance: float = 1e-10,
) -> CheckReport:
    """Check that (C^r)^n built componentwise reproduces the H^r operations.

    For random vectors and scalars, compares ``smul_r``, vector addition and
    ``inner_r`` against the same quantities assembled from ``mul_r``,
    conjugation and ``add_r`` on individual components. Deviations are
    relative to the magnitude of the compared quantity.
    """
    if n < 1 or samples < 1:
        raise DomainError("need n >= 1 and samples >= 1")
    r = check_scaling_factor(r)
    rng = np.random.default_rng(0) if rng is None else rng
    tag = UniverseTag((0.0,))
    worst = 0.0
    for _ in range(samples):
        a = make_vector(tag, r, rng.normal(size=n) + 1j * rng.normal(size=n))
        b = make_vector(tag, r, rng.normal(size=n) + 1j * rng.normal(size=n))
        c = make_scaled(tag, r, complex(rng.normal(), rng.normal()))

        direct = smul_r(c, a).ext
        worst = max(worst, _rel_vec(direct, _componentwise_smul(c, a)))
        direct = add_vec_r(a, b).ext
        worst = max(worst, _rel_vec(direct, _componentwise_add(a, b)))
        ip = inner_r(a, b).ext
        ref = _componentwise_inner(a, b)
        scale = float(np.sum(np.abs(a.ext) * np.abs(b.ext))) / r
        worst = max(worst, abs(ip - ref) / max(abs(ip), abs(ref), scale))
    return CheckReport(
        name=f"hilbert_iso[n={n},r={r:g}]",
        max_deviation=worst,
        tolerance=tolerance,
        samples=samples,
    )


def _rel_vec(x: np.ndarray, y: np.ndarray) -> float:
    denom = max(float(np.linalg.norm(x)), float(np.linalg.norm(y)))
    return 0.0 if denom == 0.0 else float(np.linalg.norm(x - y)) / denom
