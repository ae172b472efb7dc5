"""Command-line interface.

    discavg <subcommand> [options]

Subcommands: weights, vfield, flow-error, invariant, drift, scan, orbit,
repro.  Option values resolve with precedence flags > config file
(``--config``, flat key=value lines) > built-in defaults.  Tabular output
goes to stdout as CSV unless ``--out`` names a file; the literal values
``csv``/``json``/``-`` keep it on stdout in that format.  Every file
written gets a ``.manifest.json`` sidecar with the resolved parameters.
``--plot FILE`` additionally renders a figure for the report-style
subcommands (flow-error, drift, scan, orbit).

Exit codes: 0 success, 1 failed repro checks, 2 usage error, 3 domain or
escape error during computation.
"""

from __future__ import annotations

import argparse
import difflib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import figures
from .diagnostics import scan as run_scan
from .errors import (
    CapabilityError,
    DimensionMismatchError,
    DomainError,
    EscapeError,
    InsufficientDataError,
)
from .flows import IntegratorConfig, flow_error
from .interpolation import (
    InterpolationScheme,
    evaluate_field,
    forward_scheme,
    lagrange_weights,
    symmetric_scheme,
)
from .invariants import (
    DISPLAY_CAPS,
    extract_invariant,
    henon_resonance_invariant,
    htilde2_reference,
    numeric_drift,
)
from .jets import Caps, series_from_json_dict, series_to_json_dict
from .maps import iterate, iterated_map, jet_of_map, make_model, reversor_conjugate_jet
from .reporting import (
    RunManifest,
    csv_text,
    load_config,
    write_json,
    write_manifest,
    write_text,
)
from .repro import REPRO_NAMES, run_repro

USAGE_EXIT = 2
ERROR_EXIT = 3
STDOUT_TOKENS = {"csv", "json", "-"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with a nearest-flag suggestion on unknown options."""

    def _known_options(self) -> list[str]:
        known = {s for a in self._actions for s in a.option_strings}
        for action in self._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    known.update(s for a in sub._actions for s in a.option_strings)
        return sorted(known)

    def error(self, message):
        if "unrecognized arguments" in message:
            unknown = [a for a in message.split(":", 1)[1].split() if a.startswith("--")]
            known = self._known_options()
            hints = [
                f"did you mean {m[0]}?"
                for u in unknown
                if (m := difflib.get_close_matches(u, known, n=1))
            ]
            if hints:
                message += "  (" + " ".join(hints) + ")"
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


# ----------------------------------------------------------------------
# option plumbing: flags > config file > defaults
# ----------------------------------------------------------------------
def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad point '{text}' (expected comma-separated floats)")


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad range '{text}' (expected lo:hi)")
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range '{text}' (need 1 <= lo <= hi)")
    return lo, hi


_CONVERTERS = {
    "int": int,
    "float": float,
    "str": str,
    "point": _parse_point,
    "range": _parse_range,
    "flag": lambda v: str(v).lower() in ("1", "true", "yes", "on"),
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", default=None, help="output file (csv/json/- for stdout)")
    sub.add_argument("--out-json", default=None, help="JSON companion output file")
    sub.add_argument("--plot", default=None, help="render a figure to this file")
    sub.add_argument("--config", default=None, help="flat key=value config file")
    sub.add_argument("--threads", default=None, help="worker threads for scans")
    sub.add_argument("--seed", default=None, help="reserved (no stochastic component)")


def _resolve(args: argparse.Namespace, table: dict[str, tuple[str, object]]) -> dict:
    """Merge CLI values, config file and defaults for one subcommand."""
    config = load_config(args.config) if args.config else {}
    unknown = set(config) - set(table) - {"threads"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    resolved = {}
    for key, (kind, default) in table.items():
        attr = key.replace("-", "_")
        value = getattr(args, attr, None)
        if value is None and key in config:
            value = config[key]
        if value is None:
            resolved[key] = default
            continue
        if isinstance(value, str):
            try:
                value = _CONVERTERS[kind](value)
            except UsageError:
                raise
            except (ValueError, KeyError):
                raise UsageError(f"bad value for --{key}: {value!r}")
        resolved[key] = value
    threads = getattr(args, "threads", None) or config.get("threads")
    resolved["threads"] = int(threads) if threads is not None else 1
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if resolved.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join(f"--{k}" for k in missing))


def _model_from(resolved: dict):
    name = resolved["model"]
    params = {}
    for key in ("eps", "theta", "s", "dim"):
        if resolved.get(key) is not None:
            params[key] = resolved[key]
    system = make_model(name, **params)
    power = int(resolved.get("base-iterate") or 1)
    if power > 1:
        system = iterated_map(system, power)
    return system


def _scheme_from(resolved: dict) -> InterpolationScheme:
    kind = resolved.get("scheme", "symmetric")
    m = int(resolved.get("m") or 1)
    if m < 1:
        raise UsageError("--m must be >= 1")
    if kind == "forward":
        return forward_scheme(m)
    if kind == "symmetric":
        return symmetric_scheme(m)
    raise UsageError(f"unknown scheme '{kind}' (forward or symmetric)")


def _emit(resolved_out, header, rows, manifest: RunManifest, json_payload=None):
    """CSV to stdout or file (+ manifest); optional JSON companion."""
    text = csv_text(header, rows)
    if resolved_out is None or str(resolved_out) in STDOUT_TOKENS:
        if str(resolved_out) == "json" and json_payload is not None:
            write_json(None, json_payload)
        else:
            write_text(None, text)
    else:
        write_text(resolved_out, text)
        write_manifest(resolved_out, manifest)


def _emit_companion_json(path, payload, manifest: RunManifest):
    if path is None:
        return
    if str(path) in STDOUT_TOKENS:
        write_json(None, payload)
    else:
        write_json(path, payload)
        write_manifest(path, manifest)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------
_MODEL_OPTS = {
    "model": ("str", "henon"),
    "eps": ("float", None),
    "theta": ("float", None),
    "s": ("float", None),
    "dim": ("int", None),
    "base-iterate": ("int", 1),
}

TABLES: dict[str, dict[str, tuple[str, object]]] = {
    "weights": {"n0": ("int", None), "n": ("int", None)},
    "vfield": {
        **_MODEL_OPTS,
        "scheme": ("str", "symmetric"),
        "m": ("int", 1),
        "point": ("point", None),
    },
    "flow-error": {
        **_MODEL_OPTS,
        "scheme": ("str", "forward"),
        "m-range": ("range", (1, 8)),
        "point": ("point", None),
        "substeps": ("int", 64),
    },
    "invariant": {
        **_MODEL_OPTS,
        "eps-symbolic": ("flag", False),
        "scheme": ("str", "symmetric"),
        "m": ("int", 1),
        "cap-xy": ("int", 8),
        "cap-eps": ("int", 2),
    },
    "drift": {
        **_MODEL_OPTS,
        "h": ("str", "htilde2"),
        "point": ("point", None),
        "steps": ("int", 10000),
    },
    "scan": {
        **_MODEL_OPTS,
        "xmin": ("float", -1.0),
        "xmax": ("float", 1.0),
        "ymin": ("float", -1.0),
        "ymax": ("float", 1.0),
        "res": ("int", 50),
        "nmax": ("int", 10),
    },
    "orbit": {**_MODEL_OPTS, "point": ("point", None), "steps": ("int", 5000)},
    "repro": {"name": ("str", None)},
}


def cmd_weights(resolved: dict, args) -> int:
    _require(resolved, "n0", "n")
    n0, n = resolved["n0"], resolved["n"]
    if not (0 <= n0 <= n) or n < 1:
        raise UsageError("n0 must satisfy 0 <= n0 <= n (and n >= 1)")
    scheme = lagrange_weights(n0, n)
    print(",".join(str(w) for w in scheme.weights))
    if args.out and str(args.out) not in STDOUT_TOKENS:
        manifest = RunManifest("weights", resolved)
        rows = [(k, str(w)) for k, w in zip(scheme.offsets, scheme.weights)]
        write_text(args.out, csv_text(("k", "p_nk"), rows))
        write_manifest(args.out, manifest)
    return 0


def cmd_vfield(resolved: dict, args) -> int:
    _require(resolved, "point")
    system = _model_from(resolved)
    scheme = _scheme_from(resolved)
    value = evaluate_field(system, resolved["point"], scheme)
    manifest = RunManifest("vfield", resolved)
    header = tuple(f"x{i}" for i in range(len(resolved["point"]))) + tuple(
        f"X{i}" for i in range(len(value))
    )
    row = tuple(resolved["point"]) + tuple(float(v) for v in value)
    if args.out is None:
        print(",".join(repr(float(v)) for v in value))
    else:
        _emit(args.out, header, [row], manifest)
    return 0


def cmd_flow_error(resolved: dict, args) -> int:
    _require(resolved, "point")
    system = _model_from(resolved)
    cfg = IntegratorConfig(resolved["substeps"])
    lo, hi = resolved["m-range"]
    kind = resolved["scheme"]
    rows = []
    for m in range(lo, hi + 1):
        scheme = forward_scheme(m) if kind == "forward" else symmetric_scheme(m)
        rep = flow_error(system, resolved["point"], scheme, cfg)
        rows.append((m, rep.error, rep.integrator_estimate, rep.flag))
    manifest = RunManifest("flow-error", resolved)
    _emit(args.out, ("m", "error", "integrator_estimate", "flag"), rows, manifest)
    if args.plot:
        figures.error_profile_figure(
            [(r[0], r[1]) for r in rows], args.plot,
            title=f"{system.name}: time-one flow error",
        )
        write_manifest(args.plot, manifest)
    return 0


def cmd_invariant(resolved: dict, args) -> int:
    scheme = _scheme_from(resolved)
    cap_xy, cap_eps = resolved["cap-xy"], resolved["cap-eps"]
    base = int(resolved.get("base-iterate") or 1)
    if resolved["eps-symbolic"]:
        if resolved["model"] != "henon":
            raise UsageError("--eps-symbolic is available for the henon model")
        report = henon_resonance_invariant(
            scheme, cap_xy=cap_xy, cap_eps=cap_eps, base_power=base
        )
        names = ("x", "y", "eps")
    else:
        system = make_model(resolved["model"], **{
            k: resolved[k] for k in ("eps", "theta", "s", "dim") if resolved.get(k) is not None
        })
        caps = Caps(cap_xy)
        jet = jet_of_map(system, (0.0,) * system.dimension, caps)
        inverse = reversor_conjugate_jet(jet) if system.name == "henon" else None
        report = extract_invariant(jet, base, scheme, inverse_jet=inverse)
        names = ("x", "y")
    vals = report.defect_valuations

    def _val(v):
        return None if math.isinf(v) else int(v)

    payload = {
        "model": resolved["model"],
        "scheme": {"n0": scheme.n0, "n": scheme.n},
        "base_iterate": base,
        "caps": {"xy": cap_xy, "eps": cap_eps},
        "hamiltonian": series_to_json_dict(report.hamiltonian, names),
        "hamiltonian_display": series_to_json_dict(report.hamiltonian_display, names),
        "defect_valuations": {"pure": _val(vals.pure), "eps_linear": _val(vals.eps_linear)},
    }
    manifest = RunManifest("invariant", resolved)
    if args.out is None or str(args.out) in STDOUT_TOKENS:
        write_json(None, payload)
    else:
        write_json(args.out, payload)
        write_manifest(args.out, manifest)
    return 0


def _load_series_for_drift(spec: str):
    if spec == "htilde2":
        return htilde2_reference()
    if spec.startswith("from-file:"):
        path = spec.split(":", 1)[1]
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if "hamiltonian" in data:
            data = data["hamiltonian"]
        return series_from_json_dict(data)
    raise UsageError(f"unknown --h '{spec}' (use htilde2 or from-file:PATH)")


def cmd_drift(resolved: dict, args) -> int:
    _require(resolved, "point")
    system = _model_from(resolved)
    h = _load_series_for_drift(resolved["h"])
    extra = h.num_vars - system.dimension
    if extra == 0:
        params = ()
    elif extra == 1:
        eps = resolved.get("eps")
        if eps is None:
            raise UsageError("series has a parameter slot: pass --eps")
        params = (float(eps),)
    else:
        raise UsageError(
            f"series has {h.num_vars} variables, map only {system.dimension} phase dims"
        )
    stats = numeric_drift(
        system, h, resolved["point"], resolved["steps"], params=params, record=True
    )
    rows = [
        (k, float(v), float(v - stats.initial_value))
        for k, v in enumerate(stats.values)
    ]
    manifest = RunManifest("drift", resolved)
    _emit(args.out, ("k", "h", "drift"), rows, manifest)
    summary = (
        f"steps={stats.steps} max_drift={stats.max_abs!r} mean_drift={stats.mean_abs!r}"
        + (f" escaped_at={stats.escape_index}" if stats.escape_index is not None else "")
    )
    print(summary, file=sys.stderr)
    if args.plot:
        figures.drift_figure(stats.values, args.plot, title=f"{system.name}: invariant drift")
        write_manifest(args.plot, manifest)
    return 0


def cmd_scan(resolved: dict, args) -> int:
    system = _model_from(resolved)
    grid = run_scan(
        system,
        (resolved["xmin"], resolved["xmax"]),
        (resolved["ymin"], resolved["ymax"]),
        resolved["res"],
        n_max=resolved["nmax"],
        threads=resolved["threads"],
    )
    rows = [
        (x, y, n if not esc else "", g if not esc else "", esc)
        for x, y, n, g, esc in grid.records()
    ]
    manifest = RunManifest("scan", resolved)
    _emit(args.out, ("x", "y", "opt_n", "min_G", "escaped"), rows, manifest)
    meta = {
        "model": resolved["model"],
        "parameters": {k: resolved[k] for k in ("eps", "theta", "s") if resolved.get(k) is not None},
        "base_iterate": resolved.get("base-iterate") or 1,
        "x_range": [resolved["xmin"], resolved["xmax"]],
        "y_range": [resolved["ymin"], resolved["ymax"]],
        "resolution": resolved["res"],
        "n_max": resolved["nmax"],
        "non_escaped_cells": grid.non_escaped_cells,
        "escaped_cells": int(grid.escaped.sum()),
    }
    _emit_companion_json(args.out_json, meta, manifest)
    if args.plot:
        figures.scan_figure(grid, args.plot, title=f"{system.name} optimal order")
        write_manifest(args.plot, manifest)
    return 0


def cmd_orbit(resolved: dict, args) -> int:
    _require(resolved, "point")
    system = _model_from(resolved)
    x = np.asarray(resolved["point"], dtype=float)
    points = [x]
    escape = None
    for k in range(resolved["steps"]):
        try:
            x = iterate(system, x, 1)
        except EscapeError as exc:
            escape = k
            print(f"orbit escaped at step {k}: {exc}", file=sys.stderr)
            break
        points.append(x)
    pts = np.array(points)
    if system.dimension == 2:
        header = ("k", "x", "y")
    else:
        header = ("k",) + tuple(f"x{i}" for i in range(system.dimension))
    rows = [(k, *[float(v) for v in p]) for k, p in enumerate(pts)]
    manifest = RunManifest("orbit", resolved)
    _emit(args.out, header, rows, manifest)
    if args.plot:
        figures.orbit_figure(pts, args.plot, title=f"{system.name} orbit")
        write_manifest(args.plot, manifest)
    return 0 if escape is None else ERROR_EXIT


def cmd_repro(resolved: dict, args) -> int:
    name = resolved["name"]
    if name not in REPRO_NAMES:
        raise UsageError(f"unknown repro suite '{name}' (choose from {', '.join(REPRO_NAMES)})")
    checks = run_repro(name, threads=resolved["threads"])
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.criterion}: "
              f"expected {c.expected}, observed {c.observed}")
    manifest = RunManifest("repro", resolved)
    if name == "henon-h2":
        out = args.out if args.out and str(args.out) not in STDOUT_TOKENS else "henon-h2.json"
        payload = series_to_json_dict(
            henon_resonance_invariant(symmetric_scheme(1)).hamiltonian.truncated(DISPLAY_CAPS),
            ("x", "y", "eps"),
        )
        write_json(out, payload)
        write_manifest(out, manifest)
        print(f"wrote {out}", file=sys.stderr)
    _emit_companion_json(args.out_json, [c.to_dict() for c in checks], manifest)
    return 0 if all(c.passed for c in checks) else 1


_HANDLERS = {
    "weights": cmd_weights,
    "vfield": cmd_vfield,
    "flow-error": cmd_flow_error,
    "invariant": cmd_invariant,
    "drift": cmd_drift,
    "scan": cmd_scan,
    "orbit": cmd_orbit,
    "repro": cmd_repro,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="discavg", description=__doc__.split("\n\n")[1])
    subs = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    for name, table in TABLES.items():
        sub = subs.add_parser(name, prog=f"discavg {name}")
        for key, (kind, default) in table.items():
            if name == "repro" and key == "name":
                sub.add_argument("name", nargs="?", default=None)
                continue
            action = "store_true" if kind == "flag" else None
            if action:
                sub.add_argument(f"--{key}", action=action, default=None)
            else:
                sub.add_argument(f"--{key}", default=None, metavar=kind.upper())
        _add_common(sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_help()
        return USAGE_EXIT
    try:
        resolved = _resolve(args, TABLES[args.subcommand])
        return _HANDLERS[args.subcommand](resolved, args)
    except UsageError as exc:
        print(f"discavg {args.subcommand}: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (DomainError, DimensionMismatchError) as exc:
        print(f"discavg {args.subcommand}: domain error: {exc}", file=sys.stderr)
        return ERROR_EXIT
    except EscapeError as exc:
        print(
            f"discavg {args.subcommand}: escape error: {exc} "
            f"(last finite index {exc.last_index})",
            file=sys.stderr,
        )
        return ERROR_EXIT
    except (CapabilityError, InsufficientDataError) as exc:
        print(f"discavg {args.subcommand}: error: {exc}", file=sys.stderr)
        return ERROR_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
