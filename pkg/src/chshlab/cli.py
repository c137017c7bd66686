"""Command-line front end: deterministic CSV sweeps, bound tables, and simulated runs.

Angles are radians on input (a --degrees flag converts) and always radians in
the output files.  Every subcommand is a pure function of its flags and seed,
so reruns produce byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from .chsh import (
    CIRELSON_LIMIT,
    classical_bound,
    family_extremum,
    haar_sample_s,
    quantum_bounds,
    s_parameter,
)
from .expsim import NoiseModel, estimate_s
from .rng import derive_seed

DEFAULT_GRID_COUNT = 181
DEFAULT_ANGLE_LIST = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)

_CONFIG_KEYS = ("visibility", "analyzer_offset_a", "analyzer_offset_b", "accidental_fraction")


@dataclass(frozen=True)
class GridSpec:
    """Inclusive linear grid start:stop:count."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid endpoints must be finite")
        if self.count < 2:
            raise ValueError(f"grid count must be at least 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(f"grid start {self.start!r} must be below stop {self.stop!r}")

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Theta and xi grids plus the output path for the surface sweep."""

    theta_grid: GridSpec
    xi_grid: GridSpec
    output_path: str


@dataclass(frozen=True)
class RunConfig:
    """Simulated-run parameters: counting statistics, noise, seeding."""

    pairs_per_setting: int
    noise: NoiseModel
    seed: int
    replications: int

    def __post_init__(self):
        if self.pairs_per_setting < 2:
            raise ValueError("pairs-per-setting must be at least 2")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _write_rows(path: str, header: tuple[str, ...], rows) -> None:
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write output file {path!r}: {exc}") from exc


def parse_grid(text: str, degrees: bool = False) -> GridSpec:
    """Parse start:stop:count, converting endpoints from degrees when asked."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid {text!r} is not of the form start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"grid {text!r} is not of the form start:stop:count") from exc
    if degrees:
        start, stop = math.radians(start), math.radians(stop)
    return GridSpec(start=start, stop=stop, count=count)


def parse_angle_list(text: str, degrees: bool = False) -> tuple[float, ...]:
    """Parse a nonempty comma-separated list of angles."""
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("angle list must not be empty")
    try:
        values = tuple(float(item) for item in items)
    except ValueError as exc:
        raise ValueError(f"angle list {text!r} contains a non-numeric entry") from exc
    if degrees:
        values = tuple(math.radians(v) for v in values)
    return values


def load_noise_config(path: str) -> dict[str, float]:
    """Read `key = value` lines; keys limited to the noise-model fields."""
    out: dict[str, float] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise OSError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected `key = value`, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = float(value.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-numeric value for {key!r}") from exc
    return out


def resolve_noise(args: argparse.Namespace) -> NoiseModel:
    """Noise model from defaults, then config file, then explicit flags."""
    fields = {key: getattr(NoiseModel, key) for key in _CONFIG_KEYS}
    if args.config is not None:
        fields.update(load_noise_config(args.config))
    scale = math.pi / 180.0 if args.degrees else 1.0
    if args.visibility is not None:
        fields["visibility"] = args.visibility
    if args.offset_a is not None:
        fields["analyzer_offset_a"] = args.offset_a * scale
    if args.offset_b is not None:
        fields["analyzer_offset_b"] = args.offset_b * scale
    if args.accidentals is not None:
        fields["accidental_fraction"] = args.accidentals
    return NoiseModel(**fields)


def cmd_surface(spec: SweepSpec) -> None:
    thetas = spec.theta_grid.points()
    xis = spec.xi_grid.points()
    rows = []
    for theta in thetas:
        for xi in xis:
            rows.append((_fmt(theta), _fmt(xi), _fmt(s_parameter(theta, xi))))
    _write_rows(spec.output_path, ("theta", "xi", "s"), rows)


def cmd_sweep_xi(theta_list, xi_grid: GridSpec, out: str) -> None:
    if not theta_list:
        raise ValueError("theta list must not be empty")
    classical = _fmt(classical_bound())
    cirelson = _fmt(CIRELSON_LIMIT)
    rows = []
    for theta in theta_list:
        for xi in xi_grid.points():
            rows.append((_fmt(theta), _fmt(xi), _fmt(s_parameter(theta, xi)), classical, cirelson))
    _write_rows(out, ("theta", "xi", "s", "classical_limit", "cirelson_limit"), rows)


def cmd_sweep_theta(xi_list, theta_grid: GridSpec, out: str) -> None:
    if not xi_list:
        raise ValueError("xi list must not be empty")
    thetas = theta_grid.points()
    envelopes = [quantum_bounds(theta) for theta in thetas]
    rows = []
    for xi in xi_list:
        for theta, env in zip(thetas, envelopes):
            rows.append(
                (
                    _fmt(xi),
                    _fmt(theta),
                    _fmt(s_parameter(theta, xi)),
                    _fmt(env.s_min),
                    _fmt(env.s_max),
                )
            )
    _write_rows(out, ("xi", "theta", "s", "s_qmin", "s_qmax"), rows)


def cmd_bounds(theta_grid: GridSpec, out: str) -> None:
    classical = classical_bound()
    rows = []
    for theta in theta_grid.points():
        q_max = quantum_bounds(theta).s_max
        rows.append(
            (
                _fmt(theta),
                _fmt(classical),
                _fmt(q_max),
                _fmt(CIRELSON_LIMIT),
                _fmt(CIRELSON_LIMIT - q_max),
            )
        )
    _write_rows(out, ("theta", "classical_bound", "quantum_max", "cirelson", "superquantum_gap"), rows)


def cmd_simulate(theta_list, xi_list, cfg: RunConfig, out: str) -> None:
    if not theta_list or not xi_list:
        raise ValueError("theta and xi lists must not be empty")
    rows = []
    for i, theta in enumerate(theta_list):
        for j, xi in enumerate(xi_list):
            ideal = s_parameter(theta, xi)
            for rep in range(cfg.replications):
                est = estimate_s(
                    theta,
                    xi,
                    cfg.pairs_per_setting,
                    cfg.noise,
                    derive_seed(cfg.seed, i, j, rep),
                )
                rows.append(
                    (_fmt(theta), _fmt(xi), _fmt(est.s_hat), _fmt(est.std_err), _fmt(ideal))
                )
    _write_rows(out, ("theta", "xi", "s_hat", "std_err", "s_ideal"), rows)


def cmd_sample(theta: float, n: int, seed: int, out: str) -> None:
    samples = haar_sample_s(theta, n, seed)
    bounds = quantum_bounds(theta)
    rows = [(str(i), _fmt(s), "", "", "", "") for i, s in enumerate(samples)]
    rows.append(
        (
            "summary",
            "",
            _fmt(float(samples.min())),
            _fmt(float(samples.max())),
            _fmt(bounds.s_min),
            _fmt(bounds.s_max),
        )
    )
    _write_rows(out, ("index", "s_sample", "sample_min", "sample_max", "s_qmin", "s_qmax"), rows)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    parser.add_argument(
        "--degrees", action="store_true", help="interpret command-line angles as degrees"
    )
    parser.add_argument("--config", default=None, help="noise profile file with key = value lines")


def _add_noise_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--visibility", type=float, default=None, help="Werner visibility in [0, 1]")
    parser.add_argument("--offset-a", type=float, default=None, help="analyzer a offset angle")
    parser.add_argument("--offset-b", type=float, default=None, help="analyzer b offset angle")
    parser.add_argument(
        "--accidentals", type=float, default=None, help="accidental coincidence fraction in [0, 1)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chshlab",
        description="CHSH parameter sweeps, correlation bounds, and coincidence-counting simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surface", help="S over a full (theta, xi) grid")
    p.add_argument("--theta-grid", default=None, help="start:stop:count (default 0:pi:181)")
    p.add_argument("--xi-grid", default=None, help="start:stop:count (default 0:pi:181)")
    _add_common(p)

    p = sub.add_parser("sweep-xi", help="S versus xi for chosen theta values")
    p.add_argument("--theta-list", default=None, help="comma-separated theta values")
    p.add_argument("--xi-grid", default=None, help="start:stop:count (default 0:pi:181)")
    _add_common(p)

    p = sub.add_parser("sweep-theta", help="S versus theta with the spectral bound envelope")
    p.add_argument("--xi-list", default=None, help="comma-separated xi values")
    p.add_argument("--theta-grid", default=None, help="start:stop:count (default 0:pi:181)")
    _add_common(p)

    p = sub.add_parser("bounds", help="classical, spectral, and quantum-ceiling bounds per theta")
    p.add_argument("--theta-grid", default=None, help="start:stop:count (default 0:pi:181)")
    _add_common(p)

    p = sub.add_parser("simulate", help="simulated S measurements with error bars")
    p.add_argument("--theta-list", default=None, help="comma-separated theta values")
    p.add_argument("--xi-list", default=None, help="comma-separated xi values")
    p.add_argument("--pairs", type=int, default=10000, help="photon pairs per setting")
    p.add_argument("--replications", type=int, default=1, help="replications per (theta, xi)")
    _add_noise_flags(p)
    _add_common(p)

    p = sub.add_parser("sample", help="Bell-operator expectations of random pure states")
    p.add_argument("--theta", type=float, required=True, help="setting parameter theta")
    p.add_argument("--n", type=int, default=10000, help="number of random states")
    _add_common(p)

    return parser


def _default_grid() -> GridSpec:
    return GridSpec(start=0.0, stop=math.pi, count=DEFAULT_GRID_COUNT)


def _grid_arg(text: str | None, degrees: bool) -> GridSpec:
    return _default_grid() if text is None else parse_grid(text, degrees)


def _list_arg(text: str | None, degrees: bool) -> tuple[float, ...]:
    return DEFAULT_ANGLE_LIST if text is None else parse_angle_list(text, degrees)


def _dispatch(args: argparse.Namespace) -> None:
    if args.command == "surface":
        cmd_surface(
            SweepSpec(
                theta_grid=_grid_arg(args.theta_grid, args.degrees),
                xi_grid=_grid_arg(args.xi_grid, args.degrees),
                output_path=args.out,
            )
        )
    elif args.command == "sweep-xi":
        cmd_sweep_xi(
            _list_arg(args.theta_list, args.degrees),
            _grid_arg(args.xi_grid, args.degrees),
            args.out,
        )
    elif args.command == "sweep-theta":
        cmd_sweep_theta(
            _list_arg(args.xi_list, args.degrees),
            _grid_arg(args.theta_grid, args.degrees),
            args.out,
        )
    elif args.command == "bounds":
        cmd_bounds(_grid_arg(args.theta_grid, args.degrees), args.out)
    elif args.command == "simulate":
        cfg = RunConfig(
            pairs_per_setting=args.pairs,
            noise=resolve_noise(args),
            seed=args.seed,
            replications=args.replications,
        )
        cmd_simulate(
            _list_arg(args.theta_list, args.degrees),
            _list_arg(args.xi_list, args.degrees),
            cfg,
            args.out,
        )
    elif args.command == "sample":
        theta = math.radians(args.theta) if args.degrees else args.theta
        cmd_sample(theta, args.n, args.seed, args.out)
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _dispatch(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"chshlab: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
