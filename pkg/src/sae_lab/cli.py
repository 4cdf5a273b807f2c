"""Command-line front end: every module's tables and checks as CSV or JSON.

Subcommands:

* spectrum: interval energy levels against the wall parameter, by default
  201 samples uniform in arctan(gamma L / 2) with energies scaled by
  2 m L^2 / pi^2 (so the Dirichlet endpoint reads 1, 4, 9, 16, 25).
* dot: finite-difference eigenvalues, uncertainty slacks, and spectral-flow
  checks for a gridded region (built-in shape or mask file).
* scatter: half-line reflection phase shift over a wavenumber grid.
* wall: thin-square-well approximations of a Robin wall over a width list.
* hetero: junction-matrix validation verdict with identity residuals.
* dirac: domain-wall dispersion summary over an extension-parameter scan.

Output conventions: CSV always starts with a header row; JSON documents
carry "schema": 1.  Floats are printed with 17 significant digits so a
given configuration reproduces byte-identical output.  Non-finite numbers
appear as inf/-inf/nan in CSV and as the strings "inf"/"-inf"/"nan" in
JSON (which has no literal for them).  Diagnostics go to stderr; data goes
to stdout or the --output file.  Exit codes: 0 success, 2 usage or invalid
configuration, 3 unreadable input or unwritable output, 4 solver failure.

The environment variable SAE_LAB_THREADS caps how many worker threads a
parameter sweep may use (default 4; sweeps are order-preserving, so the
thread count never changes the output bytes).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import box1d, dirac_wall, hetero, qdot_fd, wall_models
from .errors import (
    DegenerateStateError,
    GridIOError,
    InvalidArgumentError,
    LabError,
    SolverFailureError,
)

__all__ = ["RunConfig", "build_parser", "main"]

SCHEMA_VERSION = 1
_SPECTRUM_LEVELS = 5


@dataclass(frozen=True)
class RunConfig:
    """A parsed invocation: the subcommand plus its parameter map."""

    subcommand: str
    params: dict

    def __post_init__(self):
        if self.params.get("format") not in ("csv", "json"):
            raise InvalidArgumentError(
                f"output format must be csv or json, got {self.params.get('format')!r}"
            )


# ---------------------------------------------------------------------------
# rendering


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, str):
                cells.append(cell)
            else:
                cells.append(_fmt(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _json_ready(value):
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    value = float(value)
    if math.isfinite(value):
        return value
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


def _json(obj) -> str:
    return json.dumps(_json_ready(obj), indent=2) + "\n"


def _sweep(fn, items):
    """Map fn over items in order, optionally on a capped thread pool."""
    raw = os.environ.get("SAE_LAB_THREADS")
    if raw is None:
        cap = 4
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise InvalidArgumentError(
                f"SAE_LAB_THREADS must be a positive integer, got {raw!r}"
            ) from None
        if cap < 1:
            raise InvalidArgumentError(
                f"SAE_LAB_THREADS must be a positive integer, got {raw!r}"
            )
    workers = min(cap, len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# spectrum


def _spectrum_gammas(length: float, params: dict):
    """(x, gamma) samples of the sweep, uniform in x = arctan(gamma L / 2).

    An x that reaches +-pi/2 (the float value) maps to gamma = +-inf: the
    spectrum there is the Dirichlet one, which is also the correct limit for
    any gamma too large to distinguish from the wall at double precision.
    """
    if params.get("gamma") is not None:
        g = params["gamma"]
        return [(math.atan(g * length / 2.0), g)]
    steps = params["gamma_steps"]
    if steps < 2:
        raise InvalidArgumentError(f"a gamma sweep needs at least 2 steps, got {steps}")
    half_pi = math.pi / 2.0
    gmin, gmax = params["gamma_min"], params["gamma_max"]
    x_lo = -half_pi if gmin is None else math.atan(gmin * length / 2.0)
    x_hi = half_pi if gmax is None else math.atan(gmax * length / 2.0)
    if not x_lo < x_hi:
        raise InvalidArgumentError(
            f"empty gamma range: min {gmin} does not lie below max {gmax}"
        )
    samples = []
    for i in range(steps):
        t = i / (steps - 1)
        x = x_lo * (1.0 - t) + x_hi * t
        if x <= -half_pi:
            gamma = -math.inf
        elif x >= half_pi:
            gamma = math.inf
        else:
            gamma = math.tan(x) * 2.0 / length
        samples.append((x, gamma))
    return samples


def cmd_spectrum(config: RunConfig) -> str:
    params = config.params
    m, L = params["mass"], params["length"]
    raw = params["raw_units"]
    scale = 1.0 if raw else 2.0 * m * L * L / math.pi**2
    samples = _spectrum_gammas(L, params)

    def solve(sample):
        x, gamma = sample
        states = box1d.solve_spectrum(box1d.BoxSpec(m=m, L=L, gamma=gamma), _SPECTRUM_LEVELS)
        return [state.energy * scale for state in states]

    tables = _sweep(solve, samples)
    energy_names = [f"e{n}" for n in range(_SPECTRUM_LEVELS)]
    if params["format"] == "csv":
        first = "gamma" if raw else "arctan_half_gamma_L"
        rows = []
        for (x, gamma), energies in zip(samples, tables):
            rows.append([gamma if raw else x, *energies])
        return _csv([first, *energy_names], rows)
    return _json(
        {
            "schema": SCHEMA_VERSION,
            "command": "spectrum",
            "mass": m,
            "length": L,
            "units": "raw" if raw else "scaled_2mL2_over_pi2",
            "rows": [
                {"arctan_half_gamma_L": x, "gamma": gamma, "energies": energies}
                for (x, gamma), energies in zip(samples, tables)
            ],
        }
    )


# ---------------------------------------------------------------------------
# dot


def _dot_grid(params: dict):
    if params.get("grid"):
        return qdot_fd.read_grid(params["grid"]), {"grid_file": params["grid"]}
    shape = params["shape"]
    n = params["resolution"]
    length = params["length"]
    second = params.get("length2")
    if shape == "interval":
        return qdot_fd.interval_grid(length, n), {"shape": "interval", "length": length}
    if shape == "rect":
        other = length if second is None else second
        return qdot_fd.rect_grid(length, other, n), {
            "shape": "rect",
            "length": length,
            "length2": other,
        }
    if shape == "disk":
        return qdot_fd.disk_grid(length, n), {"shape": "disk", "radius": length}
    if shape == "annulus":
        inner = 0.5 * length if second is None else second
        return qdot_fd.annulus_grid(inner, length, n), {
            "shape": "annulus",
            "inner_radius": inner,
            "outer_radius": length,
        }
    raise InvalidArgumentError(f"unknown shape {shape!r}")


def cmd_dot(config: RunConfig) -> str:
    params = config.params
    grid, described = _dot_grid(params)
    gamma, m, count = params["gamma"], params["mass"], params["count"]
    field = qdot_fd.RobinField.constant(gamma)
    ham = qdot_fd.build_hamiltonian(grid, field, m)
    energies, vectors = qdot_fd.solve_lowest(ham, count)

    levels = []
    for n in range(count):
        mom = qdot_fd.moments(grid, field, vectors[:, n])
        rep = qdot_fd.uncertainty_general(mom, grid.d)
        flow = None
        if math.isfinite(gamma):
            try:
                lhs, rhs = qdot_fd.spectral_flow_check(grid, gamma, m, level=n)
                flow = {"lhs": lhs, "rhs": rhs}
            except DegenerateStateError:
                flow = None
        levels.append(
            {
                "n": n,
                "energy": float(energies[n]),
                "slack_general": rep.slack_general,
                "slack_nonhermitean": rep.slack_nonhermitean,
                "flow": flow,
            }
        )

    if params["format"] == "csv":
        rows = []
        for lev in levels:
            flow = lev["flow"]
            rows.append(
                [
                    lev["n"],
                    lev["energy"],
                    lev["slack_general"],
                    lev["slack_nonhermitean"],
                    None if flow is None else flow["lhs"],
                    None if flow is None else flow["rhs"],
                ]
            )
        return _csv(
            ["n", "energy", "slack_general", "slack_nonhermitean", "flow_lhs", "flow_rhs"],
            rows,
        )
    report = {
        "schema": SCHEMA_VERSION,
        "command": "dot",
        **described,
        "gamma": gamma,
        "mass": m,
        "cells": grid.n_cells,
        "spacing": grid.h,
        "levels": levels,
    }
    return _json(report)


# ---------------------------------------------------------------------------
# scatter


def cmd_scatter(config: RunConfig) -> str:
    params = config.params
    gamma = params["gamma"]
    k_min, k_max, steps = params["k_min"], params["k_max"], params["k_steps"]
    if steps < 1:
        raise InvalidArgumentError(f"k-steps must be >= 1, got {steps}")
    if not (math.isfinite(k_min) and k_min > 0):
        raise InvalidArgumentError(f"k-min must be positive and finite, got {k_min}")
    if steps == 1:
        ks = [k_min]
    else:
        if not k_min < k_max:
            raise InvalidArgumentError(f"empty wavenumber range [{k_min}, {k_max}]")
        ks = [k_min + (k_max - k_min) * i / (steps - 1) for i in range(steps)]
    results = _sweep(lambda k: wall_models.reflection(k, gamma), ks)
    if params["format"] == "csv":
        rows = [[r.k, r.delta, r.R.real, r.R.imag] for r in results]
        return _csv(["k", "phase_shift", "re_R", "im_R"], rows)
    return _json(
        {
            "schema": SCHEMA_VERSION,
            "command": "scatter",
            "gamma": gamma,
            "rows": [
                {"k": r.k, "phase_shift": r.delta, "re_R": r.R.real, "im_R": r.R.imag}
                for r in results
            ],
        }
    )


# ---------------------------------------------------------------------------
# wall


def cmd_wall(config: RunConfig) -> str:
    params = config.params
    gamma, m = params["gamma"], params["mass"]
    try:
        widths = [float(tok) for tok in params["epsilons"].split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgumentError(
            f"--epsilons must be a comma-separated float list, got {params['epsilons']!r}"
        ) from None
    if not widths:
        raise InvalidArgumentError("--epsilons list is empty")
    rows = []
    for eps in widths:
        well = wall_models.square_well_parameters(gamma, eps, m)
        eff = wall_models.effective_gamma(well, m)
        rows.append(
            {
                "epsilon": eps,
                "well_depth": well.V0,
                "well_wavenumber": well.q,
                "effective_gamma": eff,
                "error": eff - gamma,
            }
        )
    if params["format"] == "csv":
        return _csv(
            ["epsilon", "well_depth", "well_wavenumber", "effective_gamma", "error"],
            [[r["epsilon"], r["well_depth"], r["well_wavenumber"], r["effective_gamma"], r["error"]] for r in rows],
        )
    return _json(
        {
            "schema": SCHEMA_VERSION,
            "command": "wall",
            "gamma": gamma,
            "mass": m,
            "rows": rows,
        }
    )


# ---------------------------------------------------------------------------
# hetero


def cmd_hetero(config: RunConfig) -> str:
    params = config.params
    path = params["matrix"]
    entries = hetero.parse_interface_file(path)
    residuals = [
        {"identity": name, "residual": abs(value)}
        for name, value in hetero.bilinear_residuals(entries)
    ]
    try:
        matrix = hetero.validate_interface(entries)
        verdict, reason, theta = "accepted", None, matrix.theta
    except LabError as exc:
        verdict, reason, theta = "rejected", str(exc), None
    if params["format"] == "csv":
        rows = [["verdict", verdict], ["theta", None if theta is None else theta]]
        rows += [[r["identity"], r["residual"]] for r in residuals]
        return _csv(["name", "value"], rows)
    return _json(
        {
            "schema": SCHEMA_VERSION,
            "command": "hetero",
            "file": str(path),
            "verdict": verdict,
            "reason": reason,
            "theta": theta,
            "residuals": residuals,
        }
    )


# ---------------------------------------------------------------------------
# dirac


def _eta_samples(params: dict):
    if params.get("eta") is not None:
        return [params["eta"]]
    steps = params["eta_steps"]
    if steps < 2:
        raise InvalidArgumentError(f"an eta sweep needs at least 2 steps, got {steps}")
    half_pi = math.pi / 2.0
    emin, emax = params["eta_min"], params["eta_max"]
    x_lo = -half_pi if emin is None else math.atan(emin)
    x_hi = half_pi if emax is None else math.atan(emax)
    if not x_lo < x_hi:
        raise InvalidArgumentError(f"empty eta range: min {emin} does not lie below max {emax}")
    etas = []
    for i in range(steps):
        t = i / (steps - 1)
        x = x_lo * (1.0 - t) + x_hi * t
        if x <= -half_pi:
            etas.append(-math.inf)
        elif x >= half_pi:
            etas.append(math.inf)
        else:
            etas.append(math.tan(x))
    return etas


def cmd_dirac(config: RunConfig) -> str:
    params = config.params
    m, c = params["mass"], params["light_speed"]
    etas = _eta_samples(params)

    def summarize(eta):
        wall = dirac_wall.EtaWall(eta, m=m, c=c)
        at_zero = dirac_wall.dispersion_2p1(wall, 0.0)
        at_one = dirac_wall.dispersion_2p1(wall, 1.0)
        slope = at_one.decay_rate - at_zero.decay_rate
        if slope > 0.0:
            threshold = -at_zero.decay_rate / slope / (m * c)
            side = "above"
        elif slope < 0.0:
            threshold = -at_zero.decay_rate / slope / (m * c)
            side = "below"
        elif at_zero.decay_rate > 0.0:
            threshold, side = -math.inf, "all"
        else:
            threshold, side = math.inf, "none"
        return {
            "eta": eta,
            "speed_over_c": at_zero.speed / c,
            "chemical_potential_over_mc2": at_zero.chemical_potential / (m * c * c),
            "threshold_momentum_over_mc": threshold,
            "normalizable_side": side,
        }

    rows = _sweep(summarize, etas)
    keys = [
        "eta",
        "speed_over_c",
        "chemical_potential_over_mc2",
        "threshold_momentum_over_mc",
        "normalizable_side",
    ]
    if params["format"] == "csv":
        return _csv(keys, [[row[k] for k in keys] for row in rows])
    return _json(
        {
            "schema": SCHEMA_VERSION,
            "command": "dirac",
            "mass": m,
            "light_speed": c,
            "rows": rows,
        }
    )


# ---------------------------------------------------------------------------
# wiring


def _add_output_flags(sub: argparse.ArgumentParser, default_format: str = "csv"):
    sub.add_argument(
        "--format", choices=("csv", "json"), default=default_format, help="output format"
    )
    sub.add_argument("--output", default=None, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sae-lab",
        description="Robin-wall spectra, quantum-dot checks, junction and "
        "relativistic-wall tables as CSV or JSON.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser(
        "spectrum",
        help="interval levels against the wall parameter",
        description="Five lowest interval levels over a wall-parameter sweep, "
        "sampled uniformly in arctan(gamma L / 2); energies scaled by "
        "2 m L^2 / pi^2 unless --raw-units is given.",
    )
    sp.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")
    sp.add_argument("--length", type=float, default=1.0, help="box length (default 1)")
    sp.add_argument("--gamma", type=float, default=None, help="single wall parameter instead of a sweep")
    sp.add_argument("--gamma-min", type=float, default=None, help="sweep start (default -inf)")
    sp.add_argument("--gamma-max", type=float, default=None, help="sweep end (default +inf)")
    sp.add_argument("--gamma-steps", type=int, default=201, help="sweep sample count (default 201)")
    sp.add_argument("--raw-units", action="store_true", help="emit gamma and unscaled energies")
    _add_output_flags(sp)

    dot = sub.add_parser(
        "dot",
        help="finite-difference region report",
        description="Eigenvalues, uncertainty slacks, and spectral-flow checks "
        "for a gridded region.",
    )
    dot.add_argument("--grid", default=None, help="mask file (overrides --shape)")
    dot.add_argument(
        "--shape", choices=("interval", "rect", "disk", "annulus"), default="disk",
        help="built-in region (default disk)",
    )
    dot.add_argument(
        "--resolution", type=int, default=64,
        help="cells across the primary dimension (default 64)",
    )
    dot.add_argument(
        "--length", type=float, default=1.0,
        help="interval length / rectangle first side / disk radius / annulus outer radius",
    )
    dot.add_argument(
        "--length2", type=float, default=None,
        help="rectangle second side (default: square) or annulus inner radius "
        "(default: half the outer)",
    )
    dot.add_argument("--gamma", type=float, default=0.0, help="uniform wall parameter (default 0)")
    dot.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")
    dot.add_argument("--count", type=int, default=5, help="number of levels (default 5)")
    _add_output_flags(dot, default_format="json")

    sc = sub.add_parser(
        "scatter",
        help="reflection phase shift table",
        description="Half-line reflection phase shift and amplitude over a "
        "wavenumber grid.",
    )
    sc.add_argument("--gamma", type=float, default=1.0, help="wall parameter (default 1)")
    sc.add_argument("--k-min", type=float, default=0.1, help="first wavenumber (default 0.1)")
    sc.add_argument("--k-max", type=float, default=10.0, help="last wavenumber (default 10)")
    sc.add_argument("--k-steps", type=int, default=100, help="sample count (default 100)")
    _add_output_flags(sc)

    wl = sub.add_parser(
        "wall",
        help="thin-well approximation table",
        description="Square-well parameters that mimic a Robin wall, with the "
        "effective wall parameter actually produced at each width.",
    )
    wl.add_argument("--gamma", type=float, default=2.0, help="target wall parameter (default 2)")
    wl.add_argument("--mass", type=float, default=1.0, help="particle mass (default 1)")
    wl.add_argument(
        "--epsilons", default="0.02,0.01,0.005,0.0025",
        help="comma-separated well widths (default 0.02,0.01,0.005,0.0025)",
    )
    _add_output_flags(wl)

    he = sub.add_parser(
        "hetero",
        help="junction matrix verdict",
        description="Validate a junction matrix file and report the four "
        "probability-conservation identity residuals.",
    )
    he.add_argument("--matrix", required=True, help="junction matrix JSON file")
    _add_output_flags(he, default_format="json")

    dr = sub.add_parser(
        "dirac",
        help="domain-wall dispersion summary",
        description="Drift speed, chemical potential, and normalizability "
        "threshold of domain-wall modes over an extension-parameter scan "
        "sampled uniformly in arctan(eta).",
    )
    dr.add_argument("--mass", type=float, default=1.0, help="fermion mass (default 1)")
    dr.add_argument("--light-speed", type=float, default=1.0, help="light speed (default 1)")
    dr.add_argument("--eta", type=float, default=None, help="single extension parameter instead of a scan")
    dr.add_argument("--eta-min", type=float, default=None, help="scan start (default -inf)")
    dr.add_argument("--eta-max", type=float, default=None, help="scan end (default +inf)")
    dr.add_argument("--eta-steps", type=int, default=41, help="scan sample count (default 41)")
    _add_output_flags(dr)

    return parser


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "dot": cmd_dot,
    "scatter": cmd_scatter,
    "wall": cmd_wall,
    "hetero": cmd_hetero,
    "dirac": cmd_dirac,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params = vars(args)
    try:
        config = RunConfig(subcommand=params.pop("subcommand"), params=params)
        text = _DISPATCH[config.subcommand](config)
    except GridIOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SolverFailureError, DegenerateStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_path = params.get("output")
    try:
        if out_path is None:
            sys.stdout.write(text)
        else:
            with open(out_path, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {out_path}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
