"""Command line front end.

Subcommands: ``equilibria``, ``portrait``, ``simulate``, ``orbit`` and
``verify``. Options come from flags, optionally on top of a JSON file given
with ``--config``; flags win. Exit codes: 0 success, 1 verification
failure, 2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import catalog, orbits, schemas, svg, verify
from .dynamics import COLLISION_TOL, integrate, min_pairwise_distance, read_configuration_csv
from .errors import UnsupportedGroup, VortexError
from .reduction import SymmetryScheme, embed, make_scheme

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything a subcommand needs; built from flags and an optional JSON file."""

    command: str
    group: str | None = None
    n: int | None = None
    fixed: str = "none"
    grid: tuple[int, int] = (24, 24)
    tspan: float | None = None
    tol: float = 1e-10
    jobs: int = 1
    seed: int = 0
    out: str = "out"
    section: list[str] | None = None
    u0: tuple[float, float, float] | None = None
    input: str | None = None
    view: tuple[float, float, float] = (1.0, 0.6, 0.8)
    center: str | None = None
    regularized: bool = False
    samples: int | None = None

    def scheme(self) -> SymmetryScheme:
        if self.group is None:
            if self.n is not None or self.fixed != "none":
                raise UsageError("--n and --fixed need --group")
            # no scheme given at all: the smallest dihedral one
            return make_scheme("Dn", 2, "none")
        if self.group == "Dn" and self.n is None:
            raise UsageError("--group Dn needs --n")
        if self.group == "T" and self.n is not None:
            raise UsageError("--n only applies to --group Dn")
        try:
            return make_scheme(self.group, self.n, self.fixed)
        except UnsupportedGroup as exc:
            raise UsageError(str(exc)) from exc


CONFIG_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"command"}


# ---------------------------------------------------------------- argument parsing

def _grid(text: str) -> tuple[int, int]:
    try:
        r, c = (int(x) for x in str(text).lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like 24x24, got {text!r}") from exc
    if r < 1 or c < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return r, c


def _vec3(text: str) -> tuple[float, float, float]:
    try:
        vals = tuple(float(x) for x in str(text).split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from exc
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals) or not any(vals):
        raise argparse.ArgumentTypeError(f"expected three finite, not all zero numbers, got {text!r}")
    return vals


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vortexsym", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        if scheme:
            p.add_argument("--group", choices=["Dn", "T"], default=None)
            p.add_argument("--n", type=int, default=None)
            p.add_argument("--fixed", choices=["none", "poles", "cube"], default=None)
        p.add_argument("--tol", type=_positive_float, default=None)
        p.add_argument("--jobs", type=_positive_int, default=None)
        p.add_argument("--seed", type=_seed, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--config", default=None, help="JSON file with defaults for any of these options")

    p = sub.add_parser("equilibria", help="catalogue of equilibria and collision points")
    common(p)
    p = sub.add_parser("portrait", help="sample the reduced phase portrait and render it as SVG")
    common(p)
    p.add_argument("--grid", type=_grid, default=None)
    p.add_argument("--tspan", type=_positive_float, default=None)
    p.add_argument("--view", type=_vec3, default=None)
    p.add_argument("--samples", type=_positive_int, default=None)
    p = sub.add_parser("simulate", help="integrate the full system")
    common(p)
    p.add_argument("--input", default=None, help="CSV file with one x,y,z row per vortex")
    p.add_argument("--u0", type=_vec3, default=None, help="generator of a symmetric configuration")
    p.add_argument("--tspan", type=_positive_float, default=None)
    p.add_argument("--samples", type=_positive_int, default=None)
    p = sub.add_parser("orbit", help="trace periodic orbits of the reduced system and lift them")
    common(p)
    p.add_argument("--u0", type=_vec3, default=None)
    p.add_argument("--center", default=None, help="catalogue name of a minimum or collision point")
    p.add_argument("--regularized", action="store_true", default=None)
    p.add_argument("--tspan", type=_positive_float, default=None)
    p.add_argument("--samples", type=_positive_int, default=None)
    p = sub.add_parser("verify", help="run the numerical verification suite")
    common(p, scheme=False)
    p.add_argument("--section", action="append", default=None, choices=sorted(verify.SECTIONS))
    return parser


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    try:
        schemas.validate(data, schemas.RUN_CONFIG)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"invalid config: {exc.message}") from exc
    # file values go through the same converters as flags
    converters = {"grid": _grid, "view": _vec3, "u0": _vec3}
    out = {}
    for k, v in data.items():
        if k in converters and not isinstance(v, str):
            v = ",".join(str(x) for x in v) if k != "grid" else "x".join(str(x) for x in v)
        try:
            out[k] = converters[k](v) if k in converters else v
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"config key {k}: {exc}") from exc
    if "section" in out and isinstance(out["section"], str):
        out["section"] = [out["section"]]
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = _load_config_file(args.config) if args.config else {}
    for k, v in vars(args).items():
        if k in CONFIG_KEYS and v is not None:
            values[k] = v
    try:
        cfg = RunConfig(command=args.command, **values)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.section:
        bad = [s for s in cfg.section if s not in verify.SECTIONS]
        if bad:
            raise UsageError(f"unknown section(s): {', '.join(bad)}")
    return cfg


# ---------------------------------------------------------------- output helpers

def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


class OutputSet:
    """Collects files in memory and writes them only after validation."""

    def __init__(self, root: str):
        self.root = Path(root)
        self.files: dict[str, str] = {}
        self.documents: list[tuple[object, dict]] = []

    def add_text(self, name: str, text: str) -> None:
        self.files[name] = text

    def add_json(self, name: str, doc, schema: dict) -> None:
        self.documents.append((doc, schema))
        self.files[name] = _dump_json(doc)

    def commit(self) -> None:
        for doc, schema in self.documents:
            schemas.validate(doc, schema)
        for name, text in self.files.items():
            path = self.root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)


def _round_trip(doc):
    # numpy scalars and tuples become plain JSON types
    return json.loads(json.dumps(doc, default=_jsonable))


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


# ---------------------------------------------------------------- commands

def cmd_equilibria(cfg: RunConfig) -> int:
    s = cfg.scheme()
    records = catalog.catalog_for(s)
    doc = {"scheme": s.to_json(), "n_vortices": s.n_vortices, "records": catalog.catalog_to_json(records)}
    if s.group.kind == "D":
        r = catalog.dihedral_roots(s.group.n, len(s.fixed_points) > 0)
        doc["roots"] = {"lambda_a": r.lambda_anti, "z_a": r.z_anti, "lambda_p": r.lambda_prism, "z_p": r.z_prism}
        table = catalog.format_dihedral_table(s.group.n, len(s.fixed_points) > 0)
    else:
        a2 = catalog.tetrahedral_root(len(s.fixed_points) > 0)
        doc["roots"] = {"alpha_squared": a2, "alpha": math.sqrt(a2)}
        table = catalog.format_tetrahedral_table(len(s.fixed_points) > 0)
    text = f"scheme {s.label}, {s.n_vortices} vortices\n\n{table}\n\n{catalog.format_catalog_table(records)}\n"
    out = OutputSet(cfg.out)
    out.add_json("catalog.json", _round_trip(doc), schemas.CATALOG)
    out.add_text("catalog.txt", text)
    out.commit()
    sys.stdout.write(text)
    return EXIT_OK


def cmd_portrait(cfg: RunConfig) -> int:
    s = cfg.scheme()
    spec = orbits.PortraitSpec(
        s, grid=tuple(cfg.grid), t_span=cfg.tspan or orbits.DEFAULT_T_SPAN,
        tol=min(cfg.tol * 10.0, 1e-9), samples=cfg.samples or 200,
    )
    trajs = orbits.sample_portrait(spec, jobs=cfg.jobs)
    manifest = orbits.portrait_manifest(spec, trajs)
    out = OutputSet(cfg.out)
    out.add_json("portrait.json", _round_trip(manifest), schemas.PORTRAIT)
    for entry, tr in zip(manifest["trajectories"], trajs):
        out.add_text(f"trajectories/{entry['file']}", orbits.polyline_csv(tr.points))
    markers = [(r.point, orbits.color_for(r)) for r in catalog.catalog_for(s)]
    out.add_text("portrait.svg", svg.render([(t.points, t.color) for t in trajs], markers, cfg.view,
                                            title=f"{s.label} reduced phase portrait"))
    out.commit()
    counts: dict[str, int] = {}
    for t in trajs:
        counts[t.label] = counts.get(t.label, 0) + 1
    summary = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
    print(f"{len(trajs)} trajectories ({summary}) written to {cfg.out}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    scheme_doc = None
    if cfg.input is not None:
        try:
            v0 = read_configuration_csv(Path(cfg.input).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad configuration file {cfg.input}: {exc}") from exc
    elif cfg.u0 is not None:
        s = cfg.scheme()
        v0 = embed(np.array(cfg.u0), s)
        scheme_doc = s.to_json()
    else:
        raise UsageError("simulate needs --input FILE or a scheme with --u0")
    if min_pairwise_distance(v0) <= COLLISION_TOL:
        raise UsageError("the starting configuration has coincident vortices")
    t_end = cfg.tspan or 10.0
    samples = cfg.samples or 1000
    traj = integrate(v0, t_end, cfg.tol, stride=t_end / samples)
    report = {
        "n_vortices": int(len(v0)),
        "t_end": t_end,
        "tol": cfg.tol,
        "samples": samples,
        "energy0": traj.energy0,
        "energy_drift": traj.energy_drift,
        "relative_energy_drift": traj.relative_energy_drift,
        "momentum0": traj.momentum0.tolist(),
        "momentum_drift": traj.momentum_drift,
        "max_position_drift": float(np.abs(traj.states - traj.states[0]).max()),
        "min_distance": traj.min_distance,
        "near_collision": traj.near_collision,
        "scheme": scheme_doc,
    }
    out = OutputSet(cfg.out)
    out.add_text("trajectory.csv", traj.to_csv())
    out.add_json("report.json", _round_trip(report), schemas.SIMULATION)
    out.commit()
    print(f"|dH|/|H| = {traj.relative_energy_drift:.3e}, |dJ| = {traj.momentum_drift:.3e}, "
          f"max position drift = {report['max_position_drift']:.3e}")
    if traj.near_collision:
        print("warning: vortices came within 1e-6 of each other; consider the regularized field")
    return EXIT_OK


def cmd_orbit(cfg: RunConfig) -> int:
    s = cfg.scheme()
    samples = cfg.samples or orbits.DEFAULT_SAMPLES
    failure = None
    if cfg.center is not None:
        recs = [r for r in catalog.catalog_for(s) if r.name == cfg.center and r.kind in ("min", "collision")]
        if not recs:
            names = sorted({r.name for r in catalog.catalog_for(s) if r.kind in ("min", "collision")})
            raise UsageError(f"no minimum or collision named {cfg.center!r}; choose from {', '.join(names)}")
        fam = orbits.family_from_center(recs[0], s, orbits.default_family_energies(recs[0], s),
                                        tol=cfg.tol, samples=samples)
        found = list(fam.orbits)
        failure = fam.failure_energy
    elif cfg.u0 is not None:
        found = [orbits.trace_periodic(np.array(cfg.u0), s, cfg.regularized, tol=cfg.tol,
                                       t_span=cfg.tspan, samples=samples)]
    else:
        raise UsageError("orbit needs --u0 or --center")
    out = OutputSet(cfg.out)
    entries = []
    for k, o in enumerate(found):
        lifted = orbits.lift_orbit(o, s)
        red_name, lift_name = f"orbit_{k:02d}_reduced.csv", f"orbit_{k:02d}_lifted.csv"
        out.add_text(red_name, o.to_csv())
        out.add_text(lift_name, lifted.to_csv())
        entries.append({
            "u0": o.points[0].tolist(), "energy": o.energy, "period": o.period,
            "closure_error": o.closure_error, "regularized_period": o.regularized_period,
            "time_factor": o.time_factor, "lift_residual": lifted.residual,
            "lift_energy_drift": lifted.energy_drift(), "lift_momentum": lifted.momentum_max(),
            "reduced_file": red_name, "lifted_file": lift_name,
        })
        print(f"orbit {k}: h = {o.energy:.10g}, period = {o.period:.10g}, closure = {o.closure_error:.2e}")
    doc = {"scheme": s.to_json(), "orbits": entries, "center": cfg.center, "failure_energy": failure}
    out.add_json("orbits.json", _round_trip(doc), schemas.ORBIT)
    out.commit()
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    report = verify.run(cfg.section, seed=cfg.seed, jobs=cfg.jobs)
    doc = dict(report.to_json(), seed=cfg.seed)
    text = "\n".join(report.lines()) + "\n"
    out = OutputSet(cfg.out)
    out.add_json("verify.json", doc, schemas.VERIFY)
    out.add_text("verify.txt", text)
    out.commit()
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_VERIFY


COMMANDS = {
    "equilibria": cmd_equilibria,
    "portrait": cmd_portrait,
    "simulate": cmd_simulate,
    "orbit": cmd_orbit,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (VortexError, FloatingPointError, jsonschema.ValidationError) as exc:
        print(f"{parser.prog} {args.command}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
