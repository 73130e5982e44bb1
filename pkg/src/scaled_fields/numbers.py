"""Scaled real and complex number structures.

A scaled scalar with intrinsic value ``c`` in the structure scaled by ``r`` is
stored in its external representation ``ext = r * c``. In that representation
addition and subtraction are unchanged, multiplication is ``a * b / r``,
division is ``r * a / b``, the zero is ``0`` and the identity is ``r``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable, Literal, Sequence

import numpy as np

from .charts import UniverseTag, check_same_universe
from .errors import DomainError, ScaledArithmeticError, ScaleMismatchError

Kind = Literal["real", "complex"]


def check_scaling_factor(r) -> float:
    """Validate a scaling factor: finite and strictly positive."""
    try:
        r = float(r)
    except TypeError:
        raise DomainError(f"scaling factor must be a positive real, got {r!r}") from None
    if not math.isfinite(r) or r <= 0.0:
        raise DomainError(f"scaling factor must be finite and > 0, got {r!r}")
    return r


def _kind_of(c) -> Kind:
    if isinstance(c, (complex, np.complexfloating)):
        return "complex"
    return "real"


@dataclass(frozen=True)
class ScaledScalar:
    tag: UniverseTag
    r: float
    ext: complex
    kind: Kind = "complex"

    def __post_init__(self):
        object.__setattr__(self, "r", check_scaling_factor(self.r))
        ext = complex(self.ext)
        if not (math.isfinite(ext.real) and math.isfinite(ext.imag)):
            raise DomainError(f"external representation must be finite, got {ext}")
        if self.kind == "real" and ext.imag != 0.0:
            raise DomainError(f"real scaled scalar with imaginary part {ext.imag}")
        if self.kind not in ("real", "complex"):
            raise DomainError(f"kind must be 'real' or 'complex', got {self.kind!r}")
        object.__setattr__(self, "ext", ext)

    @property
    def value(self) -> complex:
        """The intrinsic value ``ext / r``."""
        return self.ext / self.r

    def __add__(self, other):
        return add_r(self, other)

    def __sub__(self, other):
        return sub_r(self, other)

    def __mul__(self, other):
        return mul_r(self, other)

    def __truediv__(self, other):
        return div_r(self, other)

    def __neg__(self):
        return replace(self, ext=-self.ext)

    def conjugate(self) -> ScaledScalar:
        # r is real, so conjugation commutes with scaling
        return replace(self, ext=self.ext.conjugate())


def value(s: ScaledScalar) -> complex:
    return s.value


def make_scaled(tag: UniverseTag, r, c, kind: Kind | None = None) -> ScaledScalar:
    """Scaled scalar with intrinsic value ``c``; stores ``ext = r * c``."""
    r = check_scaling_factor(r)
    if kind is None:
        kind = _kind_of(c)
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise DomainError(f"value must be finite, got {c}")
    return ScaledScalar(tag, r, r * c, kind)


def zero_r(tag: UniverseTag, r, kind: Kind = "complex") -> ScaledScalar:
    return ScaledScalar(tag, r, 0.0, kind)


def one_r(tag: UniverseTag, r, kind: Kind = "complex") -> ScaledScalar:
    """Multiplicative identity; its external representation is ``r`` itself."""
    return ScaledScalar(tag, r, check_scaling_factor(r), kind)


def _check_pair(a: ScaledScalar, b: ScaledScalar) -> None:
    if not isinstance(a, ScaledScalar) or not isinstance(b, ScaledScalar):
        raise TypeError(
            "scaled arithmetic needs two ScaledScalar operands; "
            f"got {type(a).__name__} and {type(b).__name__}"
        )
    check_same_universe(a.tag, b.tag)
    if a.r != b.r:
        raise ScaleMismatchError(
            f"scaling factors differ ({a.r!r} vs {b.r!r}); rescale explicitly first"
        )


def _joint_kind(a: ScaledScalar, b: ScaledScalar) -> Kind:
    return "real" if a.kind == b.kind == "real" else "complex"


def add_r(a: ScaledScalar, b: ScaledScalar) -> ScaledScalar:
    _check_pair(a, b)
    return ScaledScalar(a.tag, a.r, a.ext + b.ext, _joint_kind(a, b))


def sub_r(a: ScaledScalar, b: ScaledScalar) -> ScaledScalar:
    _check_pair(a, b)
    return ScaledScalar(a.tag, a.r, a.ext - b.ext, _joint_kind(a, b))


def mul_r(a: ScaledScalar, b: ScaledScalar) -> ScaledScalar:
    _check_pair(a, b)
    return ScaledScalar(a.tag, a.r, a.ext * b.ext / a.r, _joint_kind(a, b))


def div_r(a: ScaledScalar, b: ScaledScalar) -> ScaledScalar:
    _check_pair(a, b)
    if b.ext == 0:
        raise ScaledArithmeticError("division by the zero of the scaled structure")
    return ScaledScalar(a.tag, a.r, a.r * a.ext / b.ext, _joint_kind(a, b))


@dataclass(frozen=True)
class AnalyticFn:
    """An analytic function usable on scaled scalars.

    ``func`` must accept a Python float or complex. ``domain`` optionally
    rejects arguments (e.g. a pole); evaluation producing NaN/inf is rejected
    regardless.
    """

    name: str
    func: Callable[[complex], complex]
    domain: Callable[[complex], bool] | None = None
    coefficients: tuple[complex, ...] | None = None

    def __call__(self, z):
        if self.domain is not None and not self.domain(z):
            raise ScaledArithmeticError(f"{z!r} is outside the domain of {self.name}")
        return self.func(z)

    @classmethod
    def polynomial(cls, coefficients: Sequence[complex]) -> AnalyticFn:
        """Polynomial with ``coefficients[k]`` multiplying ``z**k``."""
        coeffs = tuple(coefficients)
        if not coeffs:
            raise DomainError("polynomial needs at least one coefficient")

        def horner(z):
            acc = 0.0 * z + coeffs[-1]
            for c in reversed(coeffs[:-1]):
                acc = acc * z + c
            return acc

        return cls(f"poly{len(coeffs) - 1}", horner, coefficients=coeffs)

    @classmethod
    def from_callable(cls, func, name: str = "closure", domain=None) -> AnalyticFn:
        return cls(name, func, domain)


def _real_or_complex(real_fn, complex_fn):
    def f(z):
        if isinstance(z, complex):
            return complex_fn(z)
        return real_fn(z)

    return f


EXP = AnalyticFn("exp", _real_or_complex(math.exp, cmath.exp))
SIN = AnalyticFn("sin", _real_or_complex(math.sin, cmath.sin))
COS = AnalyticFn("cos", _real_or_complex(math.cos, cmath.cos))
IDENTITY = AnalyticFn("identity", lambda z: z)

BUILTIN_FUNCTIONS = {"exp": EXP, "sin": SIN, "cos": COS, "identity": IDENTITY}


def apply_analytic_r(f: AnalyticFn, a: ScaledScalar) -> ScaledScalar:
    """Scaled counterpart of ``f``: ext -> r * f(ext / r)."""
    if f is IDENTITY:
        return a
    arg = a.value.real if a.kind == "real" else a.value
    try:
        out = complex(f(arg))
    except (OverflowError, ValueError, ZeroDivisionError) as exc:
        raise ScaledArithmeticError(f"{f.name}({arg!r}) failed: {exc}") from exc
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise ScaledArithmeticError(f"{f.name}({arg!r}) is not finite")
    kind = a.kind
    if kind == "real" and out.imag != 0.0:
        raise ScaledArithmeticError(f"{f.name}({arg!r}) leaves the real structure")
    return ScaledScalar(a.tag, a.r, a.r * out, kind)


def relative_deviation(x, y, scale: float = 0.0) -> float:
    """|x - y| relative to max(|x|, |y|, scale); 0 when all are zero."""
    denom = max(abs(x), abs(y), scale)
    if denom == 0.0:
        return 0.0
    return abs(x - y) / denom
