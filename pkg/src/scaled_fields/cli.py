"""``scaled-fields`` command-line entry point.

Exit codes: 0 success, 1 numeric or domain failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import calculus as calc
from . import suites
from .charts import TaggedCoordinate, UniverseTag
from .config import RunConfig, load_config
from .errors import ConfigError, ScaledFieldsError

log = logging.getLogger("scaled_fields")

SEED_ENV = "SCALED_FIELDS_SEED"
EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2


def fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def render_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row[k]) if isinstance(row[k], (int, float)) else row[k] for k in header])
    return buf.getvalue()


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _section(cfg: RunConfig, name: str) -> dict:
    sec = cfg.sections.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name!r} must be an object")
    return sec


def _point(values, d: int, what: str) -> tuple[float, ...]:
    pt = tuple(float(x) for x in values)
    if len(pt) != d:
        raise ConfigError(f"{what} needs {d} coordinates, got {len(pt)}")
    return pt


def _box_center(cfg: RunConfig) -> tuple[float, ...]:
    return tuple(0.5 * (a + b) for a, b in cfg.quadrature.box)


# ---------------------------------------------------------------- commands


def cmd_verify(cfg: RunConfig, seed: int) -> tuple[int, dict, list[dict]]:
    rng = np.random.default_rng(seed)
    d = cfg.dimension
    box = cfg.quadrature.box
    center = _box_center(cfg)
    groups = {
        "scaled_numbers": lambda: suites.field_axioms(rng) + suites.analytic_correspondence(rng),
        "scaled_linear": lambda: suites.hilbert_suite(rng) + suites.linear_properties(rng),
        "manifold_charts": lambda: suites.chart_suite(rng, d, extra=cfg.chart),
        "theta_field": lambda: suites.theta_suite(rng, cfg.theta, box),
        "universe_maps": lambda: suites.maps_suite(rng, cfg.theta, box),
        "quadrature": suites.quadrature_suite,
        "lifted_integral": lambda: suites.lifted_suite(
            rng, cfg.theta, cfg.quadrature, cfg.field_factory, cfg.reference
        ),
        "covariant_derivative": lambda: suites.derivative_suite(cfg.theta, center),
        "du_invariance": lambda: suites.du_suite(cfg.theta, center),
        "wave_packet": lambda: suites.wave_packet_suite(rng),
        "cross_universe": lambda: suites.cross_universe_suite(rng),
    }
    results = {}
    rows = []
    all_pass = True
    for name, run in groups.items():
        t0 = time.perf_counter()
        reports = run()
        log.info("%s: %d checks in %.2fs", name, len(reports), time.perf_counter() - t0)
        results[name] = [r.to_dict() for r in reports]
        for r in reports:
            all_pass &= r.passed
            rows.append(
                {
                    "suite": name,
                    "check": r.name,
                    "passed": str(r.passed).lower(),
                    "max_deviation": r.max_deviation,
                    "tolerance": r.tolerance,
                }
            )
    payload = {"op": "verify", "seed": seed, "passed": all_pass, "suites": results}
    return (EXIT_OK if all_pass else EXIT_NUMERIC), payload, rows


def cmd_integrate(cfg: RunConfig, dump: str | None) -> tuple[int, dict, list[dict]]:
    f = cfg.field_at_reference()
    ref = TaggedCoordinate(cfg.ref_tag, cfg.reference)
    q = cfg.quadrature
    unscaled = calc.local_integral(f, q).ext
    scaled = calc.lifted_global_integral(f, cfg.theta, ref, q).ext
    err_u = calc.integral_error_estimate(f, q)
    err_s = calc.integral_error_estimate(f, q, cfg.theta, ref)
    ratio = scaled / unscaled if unscaled != 0 else complex("nan")
    payload = {
        "op": "integrate",
        "inputs": {
            "theta": {"preset": cfg.theta.preset, **cfg.theta.params()},
            "field": cfg.field_spec,
            "box": q.box,
            "n_cells": q.n_cells,
            "rule": q.rule,
            "reference": cfg.reference,
        },
        "value": {"unscaled": unscaled, "scaled": scaled, "ratio": ratio},
        "error_estimate": {"unscaled": err_u, "scaled": err_s},
        "converged": bool(
            err_u <= q.tolerance * max(abs(unscaled), 1e-300)
            and err_s <= q.tolerance * max(abs(scaled), 1e-300)
        ),
    }
    rows = [
        {
            "unscaled_re": unscaled.real,
            "unscaled_im": unscaled.imag,
            "scaled_re": scaled.real,
            "scaled_im": scaled.imag,
            "ratio_re": ratio.real,
            "ratio_im": ratio.imag,
            "unscaled_error": err_u,
            "scaled_error": err_s,
        }
    ]
    if dump:
        Path(dump).write_text(render_csv(calc.integrand_dump(f, cfg.theta, ref, q)))
    return EXIT_OK, payload, rows


def cmd_derivative(cfg: RunConfig) -> tuple[int, dict, list[dict]]:
    sec = _section(cfg, "derivative")
    d = cfg.dimension
    at_pt = _point(sec.get("at", cfg.reference), d, "derivative.at")
    mu = int(sec.get("axis", 0))
    if not 0 <= mu < d:
        raise ConfigError(f"derivative.axis {mu} out of range")
    h = float(sec.get("h", 1e-4))
    if not h > 0:
        raise ConfigError("derivative.h must be positive")
    link_spec = sec.get("link", {"kind": "identity"})
    try:
        link = calc.GaugeLink(link_spec.get("kind", "identity"), link_spec.get("phase"))
    except ScaledFieldsError as exc:
        raise ConfigError(str(exc)) from exc
    at = TaggedCoordinate(UniverseTag(at_pt), at_pt)
    psi = cfg.field_factory(at.tag)
    raw = calc.covariant_derivative(psi, mu, at, cfg.theta, link, h, richardson=False)
    extrapolated = calc.covariant_derivative(psi, mu, at, cfg.theta, link, h, richardson=True)
    limit = calc.covariant_limit(psi, mu, at, cfg.theta, link)
    payload = {
        "op": "derivative",
        "inputs": {"at": at_pt, "axis": mu, "h": h, "link": link.kind},
        "value": extrapolated,
        "forward_difference": raw,
        "limit": limit,
        "error_estimate": float(np.linalg.norm(extrapolated - raw)),
    }
    rows = [
        {
            "component": i,
            "forward_re": raw[i].real,
            "forward_im": raw[i].imag,
            "richardson_re": extrapolated[i].real,
            "richardson_im": extrapolated[i].imag,
            "limit_re": limit[i].real,
            "limit_im": limit[i].imag,
        }
        for i in range(len(raw))
    ]
    return EXIT_OK, payload, rows


def cmd_wavepacket(cfg: RunConfig) -> tuple[int, dict, list[dict]]:
    psi = cfg.field_at_reference()
    ref = TaggedCoordinate(cfg.ref_tag, cfg.reference)
    packet = calc.scaled_wave_packet(psi, cfg.theta, ref, cfg.quadrature)
    unscaled = float(np.sum(np.abs(psi.evaluate(packet.points)) ** 2) * packet.cell_volume)
    payload = {
        "op": "wavepacket",
        "inputs": {"box": cfg.quadrature.box, "n_cells": cfg.quadrature.n_cells},
        "value": {"norm2": packet.norm2, "unscaled_norm2": unscaled},
        "cells": int(packet.points.shape[0]),
        "cell_volume": packet.cell_volume,
    }
    rows = []
    for p, c, fac in zip(packet.points, packet.vector.ext, packet.factors):
        row = {f"u{k}": float(x) for k, x in enumerate(p)}
        row.update(component_re=c.real, component_im=c.imag, factor=float(fac))
        rows.append(row)
    return EXIT_OK, payload, rows


def cmd_du_check(cfg: RunConfig) -> tuple[int, dict, list[dict]]:
    sec = _section(cfg, "du_check")
    d = cfg.dimension
    at_pt = _point(sec.get("at", _box_center(cfg)), d, "du_check.at")
    axis = int(sec.get("axis", 0))
    if not 0 <= axis < d:
        raise ConfigError(f"du_check.axis {axis} out of range")
    steps = sec.get("steps") or [10.0 ** -k for k in np.arange(1.0, 3.01, 0.25)]
    steps = sorted((float(h) for h in steps), reverse=True)
    at = TaggedCoordinate(UniverseTag(at_pt), at_pt)
    report = calc.du_invariance_check(cfg.theta, at, steps, axis)
    det = report.details
    rows = [
        {"h": h, "rho": rho, "deviation": dev, "endpoint_scaled_ratio": lit}
        for h, rho, dev, lit in zip(det["steps"], det["rho"], det["deviation"], det["endpoint_scaled_ratio"])
    ]
    payload = {"op": "du-check", "inputs": {"at": at_pt, "axis": axis}, **report.to_dict()}
    return (EXIT_OK if report.passed else EXIT_NUMERIC), payload, rows


def _time_grid(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(t) for t in spec]
    if isinstance(spec, dict):
        start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        if spec.get("spacing", "log") == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log-spaced time grid needs positive endpoints")
            return np.geomspace(start, stop, num).tolist()
        return np.linspace(start, stop, num).tolist()
    raise ConfigError("cosmo.times must be a list or {start, stop, num, spacing}")


def cmd_cosmo(cfg: RunConfig) -> tuple[int, dict, list[dict]]:
    sec = _section(cfg, "cosmo")
    times = _time_grid(sec.get("times", {"start": 0.01, "stop": 14.0, "num": 60, "spacing": "log"}))
    present = float(sec.get("present_age", 14.0))
    ds2 = float(sec.get("ds2", 1.0))
    space = sec.get("space_point")
    if space is not None:
        space = _point(space, cfg.dimension, "cosmo.space_point")
    rows = calc.distance_table(cfg.theta, times, present, ds2, space)
    payload = {
        "op": "cosmo",
        "inputs": {"present_age": present, "ds2": ds2, "theta": cfg.theta.params()},
        "rows": rows,
    }
    return EXIT_OK, payload, rows


# ---------------------------------------------------------------- plumbing

COMMANDS = ("verify", "integrate", "derivative", "wavepacket", "du-check", "cosmo")
DEFAULT_FORMAT = {"cosmo": "csv", "du-check": "csv"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaled-fields",
        description="Scaled arithmetic and field calculus: invariant checks and integrals.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration (defaults built in)")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--cells", type=int, help="override quadrature cells per axis")
    parser.add_argument("--seed", type=int, help=f"sampling seed (fallback: ${SEED_ENV}, then 0)")
    parser.add_argument("--dump", help="integrate: write the per-node integrand table to this CSV")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        seed = resolve_seed(args.seed)
        cfg = load_config(args.config, args.cells)
        out_sec = cfg.sections.get("output", {}) or {}
        fmt_choice = args.format or out_sec.get("format") or DEFAULT_FORMAT.get(args.command, "json")
        if fmt_choice not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {fmt_choice!r}")
        out_path = args.out or out_sec.get("path")
        if args.command == "verify":
            code, payload, rows = cmd_verify(cfg, seed)
        elif args.command == "integrate":
            code, payload, rows = cmd_integrate(cfg, args.dump or out_sec.get("dump"))
        elif args.command == "derivative":
            code, payload, rows = cmd_derivative(cfg)
        elif args.command == "wavepacket":
            code, payload, rows = cmd_wavepacket(cfg)
        elif args.command == "du-check":
            code, payload, rows = cmd_du_check(cfg)
        else:
            code, payload, rows = cmd_cosmo(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScaledFieldsError, ArithmeticError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = render_json(payload) if fmt_choice == "json" else render_csv(rows)
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    if code != EXIT_OK:
        print(f"{args.command}: checks failed", file=sys.stderr)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
