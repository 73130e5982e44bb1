"""Tensor-product Newton-Cotes rules on a box, with a deterministic reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import ConfigError

RULE_ORDER = {"midpoint": 2, "trapezoid": 2, "simpson": 4}


@dataclass(frozen=True, init=False)
class QuadratureSpec:
    box: tuple[tuple[float, float], ...]
    n_cells: tuple[int, ...]
    rule: str = "simpson"
    tolerance: float = 1e-8

    def __init__(self, box, n_cells=64, rule: str = "simpson", tolerance: float = 1e-8):
        try:
            box = tuple((float(a), float(b)) for a, b in box)
        except (TypeError, ValueError):
            raise ConfigError(f"box must be a list of [lo, hi] pairs, got {box!r}") from None
        if not box:
            raise ConfigError("box needs at least one axis")
        if isinstance(n_cells, (int, np.integer)):
            n_cells = (int(n_cells),) * len(box)
        n_cells = tuple(int(n) for n in n_cells)
        if len(n_cells) != len(box):
            raise ConfigError(f"{len(n_cells)} cell counts for a {len(box)}-axis box")
        for lo, hi in box:
            if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                raise ConfigError(f"box axis [{lo}, {hi}] must be finite with hi > lo")
        if rule not in RULE_ORDER:
            raise ConfigError(f"unknown rule {rule!r}; choose from {sorted(RULE_ORDER)}")
        for n in n_cells:
            if n < 2:
                raise ConfigError(f"need at least 2 cells per axis, got {n}")
            if rule == "simpson" and n % 2:
                raise ConfigError(f"simpson rule needs an even cell count per axis, got {n}")
        if not tolerance > 0:
            raise ConfigError("tolerance must be positive")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "n_cells", n_cells)
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "tolerance", float(tolerance))

    @property
    def d(self) -> int:
        return len(self.box)

    @property
    def order(self) -> int:
        return RULE_ORDER[self.rule]

    def with_cells(self, n_cells) -> QuadratureSpec:
        return QuadratureSpec(self.box, n_cells, self.rule, self.tolerance)

    def refined(self, factor: int = 2) -> QuadratureSpec:
        return self.with_cells(tuple(n * factor for n in self.n_cells))

    def cell_volume(self) -> float:
        return float(np.prod([(b - a) / n for (a, b), n in zip(self.box, self.n_cells)]))


def _axis_rule(lo: float, hi: float, n: int, rule: str) -> tuple[np.ndarray, np.ndarray]:
    h = (hi - lo) / n
    if rule == "midpoint":
        nodes = lo + h * (np.arange(n) + 0.5)
        return nodes, np.full(n, h)
    nodes = np.linspace(lo, hi, n + 1)
    if rule == "trapezoid":
        w = np.full(n + 1, h)
        w[0] = w[-1] = h / 2
        return nodes, w
    w = np.empty(n + 1)
    w[0::2] = 2.0
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return nodes, w * (h / 3.0)


def grid(q: QuadratureSpec, rule: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(N, d)`` and weights ``(N,)`` in C order over the axes."""
    rule = q.rule if rule is None else rule
    axes = [_axis_rule(lo, hi, n, rule) for (lo, hi), n in zip(q.box, q.n_cells)]
    nodes = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    points = np.stack([m.reshape(-1) for m in nodes], axis=1)
    weights = reduce(np.multiply.outer, [a[1] for a in axes]).reshape(-1)
    return points, weights


def exact_sum(terms: Sequence[complex] | np.ndarray) -> complex:
    """Correctly rounded sum; independent of evaluation order."""
    terms = np.asarray(terms)
    if np.iscomplexobj(terms):
        return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    return complex(math.fsum(terms.tolist()))
