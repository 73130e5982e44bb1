"""Maps between universes.

``same_value_map`` moves a value to another universe without touching its
numbers. A scaling map W multiplies the external representation and the
recorded factor by the same r, so the intrinsic value survives. The
transport Z only retags. Composing Z after W gives the scaled version of the
value-preserving map.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Union

import numpy as np

from .charts import TaggedCoordinate, UniverseTag, check_same_universe
from .errors import DomainError
from .linear import ScaledVector
from .numbers import ScaledScalar, check_scaling_factor, relative_deviation
from .reports import CheckReport
from .theta import ThetaField, scale_factor

Scaled = Union[ScaledScalar, ScaledVector]
MapKind = Literal["value_preserving", "scaling", "transport"]


def same_value_map(s: Scaled, to: UniverseTag) -> Scaled:
    if isinstance(s, ScaledVector):
        return ScaledVector(to, s.r, s.ext)
    return replace(s, tag=to)


def rescale(s: Scaled, factor: float) -> Scaled:
    """Apply a scaling map: ext and r are both multiplied by ``factor``."""
    factor = check_scaling_factor(factor)
    if isinstance(s, ScaledVector):
        return ScaledVector(s.tag, s.r * factor, s.ext * factor)
    return replace(s, r=s.r * factor, ext=s.ext * factor)


@dataclass(frozen=True)
class StructureMap:
    """A map from the structures of ``from_tag`` to those of ``to_tag``.

    ``kind='scaling'`` maps stay inside one universe, ``'transport'`` maps only
    retag, and ``'value_preserving'`` maps retag with an optional scaling
    applied in the same step (the direct form of transport-after-scaling).
    """

    from_tag: UniverseTag
    to_tag: UniverseTag
    scaling: float = 1.0
    kind: MapKind = "value_preserving"

    def __post_init__(self):
        object.__setattr__(self, "scaling", check_scaling_factor(self.scaling))
        if self.kind == "scaling" and self.from_tag != self.to_tag:
            raise DomainError("a scaling map acts within a single universe")
        if self.kind == "transport" and self.scaling != 1.0:
            raise DomainError("a transport map carries no scaling")

    def __call__(self, s: Scaled) -> Scaled:
        check_same_universe(s.tag, self.from_tag)
        out = s if self.scaling == 1.0 else rescale(s, self.scaling)
        if self.to_tag != self.from_tag:
            out = same_value_map(out, self.to_tag)
        return out

    def compose(self, inner: StructureMap) -> StructureMap:
        """``self`` after ``inner``."""
        check_same_universe(inner.to_tag, self.from_tag)
        return StructureMap(
            inner.from_tag, self.to_tag, inner.scaling * self.scaling, "value_preserving"
        )

    def inverse(self) -> StructureMap:
        return StructureMap(self.to_tag, self.from_tag, 1.0 / self.scaling, self.kind)


def scaling_map(tag: UniverseTag, r: float) -> StructureMap:
    return StructureMap(tag, tag, r, "scaling")


def transport_map(from_tag: UniverseTag, to_tag: UniverseTag) -> StructureMap:
    return StructureMap(from_tag, to_tag, 1.0, "transport")


def scaled_representation(
    s: ScaledScalar, theta: ThetaField, at: TaggedCoordinate, ref: TaggedCoordinate
) -> ScaledScalar:
    """Scaled representation, in ref's universe, of a value living at ``at``.

    ``s`` must already have been transported to ``ref.tag``; the factor is
    exp(theta(at) - theta(ref)).
    """
    check_same_universe(s.tag, ref.tag)
    return rescale(s, scale_factor(theta, at, ref))


def factorization_check(
    theta: ThetaField,
    pairs: int = 100,
    *,
    box=None,
    rng: np.random.Generator | None = None,
    tolerance: float = 1e-12,
) -> CheckReport:
    """Compare Z(W(s)) with the direct scaled map on random scalars and point pairs.

    Also checks that with theta differences switched off (r = 1) the
    composition is bitwise the plain value-preserving map.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    if box is None:
        box = [(-1.0, 1.0)] * theta.d
    box = np.asarray(box, dtype=float).reshape(theta.d, 2)
    worst = 0.0
    collapse_ok = True
    for _ in range(pairs):
        y, x = rng.uniform(box[:, 0], box[:, 1], size=(2, theta.d))
        tag_x, tag_y = UniverseTag(tuple(x)), UniverseTag(tuple(y))
        # theta(phi(y)) expressed at x: u, v share x's coordinate system
        u, v = TaggedCoordinate(tag_x, tuple(y)), TaggedCoordinate(tag_x, tuple(x))
        r = scale_factor(theta, u, v)
        s = ScaledScalar(tag_x, 1.0, complex(rng.normal(), rng.normal()))

        composed = transport_map(tag_x, tag_y)(scaling_map(tag_x, r)(s))
        direct = StructureMap(tag_x, tag_y, r)(s)
        expected_ext = r * s.ext
        dev = max(
            relative_deviation(composed.ext, direct.ext),
            relative_deviation(composed.ext, expected_ext),
            relative_deviation(composed.r, r),
        )
        if composed.tag != tag_y:
            dev = float("inf")
        worst = max(worst, dev)

        plain = transport_map(tag_x, tag_y)(scaling_map(tag_x, 1.0)(s))
        collapse_ok &= plain == same_value_map(s, tag_y)
    return CheckReport(
        name=f"factorization[{theta.preset}]",
        max_deviation=worst,
        tolerance=tolerance,
        samples=pairs,
        details={"unit_scaling_collapses": collapse_ok},
        verdict=collapse_ok and worst <= tolerance,
    )
