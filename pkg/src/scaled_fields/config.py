"""JSON run configuration for the command-line front end."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import calculus as calc
from .charts import ChartFamily, UniverseTag, make_chart
from .errors import ConfigError
from .quadrature import QuadratureSpec
from .theta import ThetaField, make_theta

FIELD_KINDS = ("const", "linear", "exp", "gaussian", "polynomial")

DEFAULT_CONFIG: dict[str, Any] = {
    "dimension": 1,
    "chart": {"preset": "identity"},
    "theta": {"preset": "linear", "params": {"a": [1.0]}},
    "field": {"kind": "const", "params": {"c": 1.0}},
    "quadrature": {"box": [[0.0, 1.0]], "n_cells": 256, "rule": "simpson", "tolerance": 1e-8},
    "reference": [0.0],
}


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _field_factory(spec: dict, d: int) -> Callable[[UniverseTag], calc.FieldOnChart]:
    kind = spec.get("kind")
    params = dict(spec.get("params", {}))
    if kind not in FIELD_KINDS:
        raise ConfigError(f"unknown field kind {kind!r}; choose from {list(FIELD_KINDS)}")
    if kind == "const":
        c = _complex(params.pop("c", 1.0))
        factory = lambda tag: calc.const_field(tag, c)
    elif kind == "linear":
        a = params.pop("a", None)
        b = _complex(params.pop("b", 0.0))
        factory = lambda tag: calc.linear_field(tag, a, b)
    elif kind == "exp":
        k = params.pop("k", None)
        amp = _complex(params.pop("amplitude", 1.0))
        factory = lambda tag: calc.exp_field(tag, k, amp)
    elif kind == "gaussian":
        center = params.pop("center", None)
        sigma = float(params.pop("sigma", 1.0))
        amp = _complex(params.pop("amplitude", 1.0))
        normalized = bool(params.pop("normalized", False))
        if sigma <= 0:
            raise ConfigError("gaussian sigma must be positive")
        factory = lambda tag: calc.gaussian_field(tag, center, sigma, amp, normalized)
    else:
        coeffs = [_complex(c) for c in params.pop("coefficients", [])]
        axis = int(params.pop("axis", 0))
        if not coeffs:
            raise ConfigError("polynomial field needs 'coefficients'")
        if not 0 <= axis < d:
            raise ConfigError(f"polynomial axis {axis} out of range")
        factory = lambda tag: calc.polynomial_field(tag, coeffs, axis)
    if params:
        raise ConfigError(f"unexpected parameters for field {kind!r}: {sorted(params)}")
    return factory


@dataclass
class RunConfig:
    dimension: int
    chart: ChartFamily
    theta: ThetaField
    field_spec: dict
    field_factory: Callable[[UniverseTag], calc.FieldOnChart]
    quadrature: QuadratureSpec
    reference: tuple[float, ...]
    sections: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def ref_tag(self) -> UniverseTag:
        return UniverseTag(self.reference)

    def field_at_reference(self) -> calc.FieldOnChart:
        return self.field_factory(self.ref_tag)

    @classmethod
    def from_dict(cls, data: dict, cells: int | None = None) -> RunConfig:
        try:
            return cls._build(data, cells)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    @classmethod
    def _build(cls, data: dict, cells: int | None) -> RunConfig:
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        merged = {**DEFAULT_CONFIG, **data}
        d = int(merged["dimension"])
        if not 1 <= d <= 4:
            raise ConfigError(f"dimension must be 1..4, got {d}")
        # the defaults are 1-D; other dimensions must spell these out
        missing = [k for k in ("theta", "quadrature", "reference") if k not in data]
        if d != 1 and missing:
            raise ConfigError(f"{missing} required when dimension is {d}")

        chart_spec = merged["chart"]
        chart = make_chart(chart_spec["preset"], d, **chart_spec.get("params", {}))
        theta_spec = merged["theta"]
        theta = make_theta(
            theta_spec["preset"],
            d,
            offset=float(theta_spec.get("offset", 0.0)),
            **theta_spec.get("params", {}),
        )
        field_spec = merged["field"]
        factory = _field_factory(field_spec, d)

        qs = merged["quadrature"]
        n_cells = qs.get("n_cells", 64) if cells is None else cells
        q = QuadratureSpec(qs["box"], n_cells, qs.get("rule", "simpson"), qs.get("tolerance", 1e-8))
        if q.d != d:
            raise ConfigError(f"quadrature box has {q.d} axes but dimension is {d}")

        reference = tuple(float(x) for x in merged["reference"])
        if len(reference) != d:
            raise ConfigError(f"reference coordinate has {len(reference)} entries, need {d}")
        if not all(np.isfinite(reference)):
            raise ConfigError("reference coordinate must be finite")

        sections = {k: merged[k] for k in ("derivative", "du_check", "cosmo", "output") if k in merged}
        return cls(d, chart, theta, field_spec, factory, q, reference, sections, merged)


def load_config(path: str | Path | None, cells: int | None = None) -> RunConfig:
    if path is None:
        return RunConfig.from_dict({}, cells)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data, cells)
