"""Command line front end: JSON configs in, deterministic CSV out.

Every subcommand reads one JSON config (--config), writes one CSV table
(--out, default stdout) and prints progress notes to stderr unless --quiet.
Numbers are formatted with 17 significant digits so doubles round-trip and
repeated runs are byte-identical.

Exit codes: 0 on success, 1 on domain errors from the geometry modules,
2 on config parse or schema errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ConfigError, GeometryError
from .gh_collapse import CollapseConfig, collapse_experiment
from .killing_quotient import OrbitBasis, PointMetric, quotient_metric_form
from .soliton import (
    CallablePotential,
    SolitonParams,
    soliton_potential,
    soliton_residual,
    solve_warp_ode,
)
from .su2_geometry import (
    BergerMetric,
    find_submersion_radius,
    slope_quotient_metric,
    submersion_radius_scan,
)
from .warped_metric import (
    DELTA_CAP,
    TransformParams,
    gauss_curvature,
    inverse_transformed_warp,
    make_warp,
    metric_from_warp,
    transformed_warp,
)

_REQUIRED = object()


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _num(cfg: dict, key: str, default=_REQUIRED) -> float:
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing config key {key!r}")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number")
    return float(v)


def _int(cfg: dict, key: str, default=_REQUIRED) -> int:
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing config key {key!r}")
        return default
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"config key {key!r} must be an integer")
    return v


def _str(cfg: dict, key: str, default=_REQUIRED) -> str:
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing config key {key!r}")
        return default
    v = cfg[key]
    if not isinstance(v, str):
        raise ConfigError(f"config key {key!r} must be a string")
    return v


def _warp_of(cfg: dict):
    return make_warp(_str(cfg, "family"), _num(cfg, "a", 1.0))


def _params_of(cfg: dict) -> TransformParams:
    """Accept either {"kappa": x} or the integer pair {"m1", "m2"}."""
    r = _num(cfg, "r")
    if "m1" in cfg or "m2" in cfg:
        return TransformParams.from_slope_pair(_int(cfg, "m1"),
                                               _int(cfg, "m2"), r)
    return TransformParams(r=r, kappa=_num(cfg, "kappa"))


def _rho_grid(cfg: dict, default_max: float = 2.0):
    rho_min = _num(cfg, "rho_min", 0.0)
    rho_max = _num(cfg, "rho_max", default_max)
    n = _int(cfg, "n", 201)
    if n < 2:
        raise ConfigError("need n >= 2 grid points")
    if not rho_max > rho_min:
        raise ConfigError("need rho_max > rho_min")
    return np.linspace(rho_min, rho_max, n)


# ---------------------------------------------------------------------------
# subcommand handlers: config dict -> (csv text, stderr info lines)
# ---------------------------------------------------------------------------

def _cmd_transform(cfg: dict):
    warp = _warp_of(cfg)
    params = _params_of(cfg)
    direction = _str(cfg, "direction", "forward")
    if direction not in ("forward", "inverse"):
        raise ConfigError("direction must be 'forward' or 'inverse'")
    rho = _rho_grid(cfg)
    metric_from_warp(warp, float(rho[-1]), float(rho[0]))  # domain check
    if direction == "forward":
        out = transformed_warp(warp, params.r, params.kappa)
    else:
        out = inverse_transformed_warp(warp, params.r, params.kappa)
    rows = np.column_stack([rho, warp.f(rho), out.f(rho)])
    info = [f"transform: {warp.kind} -> {out.kind} "
            f"(r={params.r:g}, kappa={params.kappa:g}, {direction})"]
    return _csv(["rho", "f", "f_transformed"], rows), info


def _cmd_curvature(cfg: dict):
    warp = _warp_of(cfg)
    rho = _rho_grid(cfg)
    metric = metric_from_warp(warp, float(rho[-1]), float(rho[0]))
    k = np.asarray(gauss_curvature(metric, rho), dtype=float)
    rows = np.column_stack([rho, np.broadcast_to(k, rho.shape)])
    return _csv(["rho", "K"], rows), [f"curvature: {warp.kind}"]


def _cmd_soliton(cfg: dict):
    params = SolitonParams(A=_num(cfg, "A"), B=_num(cfg, "B", 1.0))
    rho_max = _num(cfg, "rho_max", 4.0)
    step = _num(cfg, "step", 0.01)
    warp = solve_warp_ode(params, rho_max, step)
    rho = warp.rho_nodes
    f = warp.f(rho)
    fp = params.B - params.A * f * f          # the ODE itself
    k = 2.0 * params.A * fp                   # K = -f''/f via the ODE
    if params.A == 0.0:
        pot = CallablePotential(lambda x: np.zeros_like(np.asarray(x, float)),
                                lambda x: np.zeros_like(np.asarray(x, float)),
                                lambda x: np.zeros_like(np.asarray(x, float)))
    elif params.B == 1.0:
        pot = soliton_potential(params)
    else:
        pot = None
    phi = np.full_like(f, np.nan)
    res1 = np.full_like(f, np.nan)
    res2 = np.full_like(f, np.nan)
    if pot is not None:
        phi = np.asarray(pot.phi(rho), dtype=float)
        ok = f > DELTA_CAP
        if np.any(ok):
            r1, r2 = soliton_residual(warp, pot, rho[ok])
            res1[ok] = r1
            res2[ok] = r2
    rows = np.column_stack([rho, f, fp, k, phi, res1, res2])
    info = [f"soliton: A={params.A:g} B={params.B:g} "
            f"step={step:g} rows={len(rho)}"]
    return _csv(["rho", "f", "fprime", "K", "phi", "res1", "res2"], rows), info


def _cmd_quotient(cfg: dict):
    for key in ("metric", "h_vectors", "frame"):
        if key not in cfg:
            raise ConfigError(f"missing config key {key!r}")
    try:
        g = np.asarray(cfg["metric"], dtype=float)
        basis = OrbitBasis(np.asarray(cfg["h_vectors"], dtype=float))
        frame = np.asarray(cfg["frame"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"quotient config must hold numeric arrays: {exc}") \
            from exc
    h = quotient_metric_form(PointMetric(g), basis, frame)
    n = h.dim
    header = [f"c{j}" for j in range(n)]
    return _csv(header, h.matrix), [f"quotient: {n} x {n} matrix"]


def _berger_metric_of(cfg: dict) -> BergerMetric:
    if "xi" in cfg:
        return slope_quotient_metric(_num(cfg, "xi"))
    return BergerMetric(_num(cfg, "A"), _num(cfg, "B"), _num(cfg, "C"))


def _cmd_berger(cfg: dict):
    metric = _berger_metric_of(cfg)
    r_min = _num(cfg, "radius_min", 0.05)
    r_max = _num(cfg, "radius_max", 3.0)
    num = _int(cfg, "num", 121)
    samples = _int(cfg, "samples", 200)
    seed = _int(cfg, "seed", 0)
    if not (0 < r_min < r_max) or num < 2:
        raise ConfigError("need 0 < radius_min < radius_max and num >= 2")
    radii = np.linspace(r_min, r_max, num)
    scan = submersion_radius_scan(metric, radii, samples=samples, seed=seed)
    best_r, best_d = find_submersion_radius(metric, samples=samples,
                                            seed=seed, radius_lo=r_min,
                                            radius_hi=r_max)
    rows = np.column_stack([radii, scan])
    info = [f"berger: A={metric.A:g} B={metric.B:g} C={metric.C:g}",
            f"berger: best radius {best_r:.12g} "
            f"with distortion {best_d:.3e}"]
    return _csv(["target_radius", "max_distortion"], rows), info


def _cmd_collapse(cfg: dict):
    config = CollapseConfig.from_json(cfg)
    rows = collapse_experiment(config)
    table = [(row.p, row.distortion, row.gh_upper_bound,
              row.grid_floor_estimate) for row in rows]
    info = [f"collapse: p={row.p} distortion={row.distortion:.6g}"
            for row in rows]
    return _csv(["p", "distortion", "gh_upper_bound",
                 "grid_floor_estimate"], table), info


_HANDLERS = {
    "transform": _cmd_transform,
    "curvature": _cmd_curvature,
    "soliton": _cmd_soliton,
    "quotient": _cmd_quotient,
    "berger": _cmd_berger,
    "collapse": _cmd_collapse,
}

_HELP = {
    "transform": "warp transform table: rho,f,f_transformed",
    "curvature": "Gauss curvature table: rho,K",
    "soliton": "soliton ODE table: rho,f,fprime,K,phi,res1,res2",
    "quotient": "quotient metric matrix from {metric, h_vectors, frame}",
    "berger": "submersion distortion scan: target_radius,max_distortion",
    "collapse": "collapse experiment: p,distortion,gh_upper_bound,"
                "grid_floor_estimate",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collapse-lab",
        description="Numerical experiments with collapsing warped metrics.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{" + ",".join(_HANDLERS) + "}")
    for name, handler in _HANDLERS.items():
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", required=True,
                       help="path to the JSON config")
        p.add_argument("--out", default="-",
                       help="output CSV path (default: stdout)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress notes on stderr")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: line "
                          f"{exc.lineno}, column {exc.colno}: {exc.msg}") \
            from exc
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    return obj


def _write_output(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        csv_text, info = _HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"collapse-lab: config error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"collapse-lab: error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        for line in info:
            print(line, file=sys.stderr)
    _write_output(args.out, csv_text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
