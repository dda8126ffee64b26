"""Command-line interface: run, benchmark, diag, and topology subcommands.

Run specifications are strict JSON documents (unknown keys are rejected)
with 1-based particle indices in topology descriptions, matching the
topology file format. Exit codes: 0 success, 1 validation error,
2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import benchmark as bench
from . import diagnostics, dynamics, initial, io
from .potential import ModelParams
from .simplex_set import (
    SimplexSet,
    base_point_set,
    full_set,
    load_topology,
    save_topology,
    validate,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

_SPEC_KEYS = {
    "N", "d", "n", "kappa", "mode", "topology", "init", "seed",
    "integrator", "outputs", "volume_budget",
}
_INTEGRATOR_KEYS = {"dt", "steps", "record_every", "method", "stop_ratio"}
_OUTPUT_KEYS = {"trajectory", "diagnostics"}


class SpecError(ValueError):
    """Invalid run specification."""


def parse_run_spec(doc: dict) -> dict:
    """Validate a run-spec dictionary, filling defaults."""
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")
    for key in ("N", "d", "n", "mode", "init"):
        if key not in doc:
            raise SpecError(f"missing required spec key: {key!r}")
    spec = {
        "N": int(doc["N"]),
        "d": int(doc["d"]),
        "n": int(doc["n"]),
        "kappa": float(doc.get("kappa", 1.0)),
        "mode": doc["mode"],
        "topology": doc.get("topology"),
        "init": doc["init"],
        "seed": doc.get("seed"),
        "integrator": dict(doc.get("integrator", {})),
        "outputs": dict(doc.get("outputs", {})),
        "volume_budget": doc.get("volume_budget"),
    }
    if spec["mode"] not in ("full", "reduced"):
        raise SpecError(f"mode must be 'full' or 'reduced', got {spec['mode']!r}")
    if spec["mode"] == "reduced" and spec["topology"] is None:
        raise SpecError("reduced mode requires a topology")
    unknown = set(spec["integrator"]) - _INTEGRATOR_KEYS
    if unknown:
        raise SpecError(f"unknown integrator keys: {sorted(unknown)}")
    unknown = set(spec["outputs"]) - _OUTPUT_KEYS
    if unknown:
        raise SpecError(f"unknown output keys: {sorted(unknown)}")
    if not isinstance(spec["init"], dict) or "kind" not in spec["init"]:
        raise SpecError("init must be an object with a 'kind' key")
    if spec["init"]["kind"] != "file" and spec["seed"] is None:
        raise SpecError("generated initial data requires a seed")
    return spec


def build_topology(spec_topology, N: int, n: int) -> SimplexSet:
    """Materialize a topology description (1-based indices) or file."""
    kind = spec_topology.get("kind")
    if kind == "full":
        return full_set(N, n)
    if kind == "base-point":
        bases = [[int(v) - 1 for v in b] for b in spec_topology["bases"]]
        return base_point_set(bases, N, n=n)
    if kind == "file":
        return load_topology(spec_topology["path"])
    raise SpecError(f"unknown topology kind: {kind!r}")


def run_from_spec(spec: dict) -> tuple[dynamics.Trajectory, diagnostics.DiagnosticsReport]:
    """Execute a validated run spec and return trajectory and report."""
    params = ModelParams(n=spec["n"], kappa=spec["kappa"], mode=spec["mode"])
    seed = int(spec["seed"]) if spec["seed"] is not None else 0
    positions = initial.generate(spec["init"], spec["N"], spec["d"], spec["n"], seed)
    if positions.shape != (spec["N"], spec["d"]):
        raise SpecError(
            f"initial data has shape {positions.shape}, spec says ({spec['N']}, {spec['d']})"
        )
    sset = None
    if spec["mode"] == "reduced":
        sset = build_topology(spec["topology"], spec["N"], spec["n"])
        problems = validate(sset)
        if problems:
            raise SpecError("invalid topology: " + "; ".join(problems))
    integ = dynamics.IntegratorConfig(**spec["integrator"])
    budget = spec["volume_budget"]
    traj = dynamics.simulate(
        positions, params, sset=sset, integ=integ,
        volume_budget=int(budget) if budget else None, seed=seed,
    )
    report = diagnostics.check_trajectory(traj, params, dt=integ.dt)
    return traj, report


def _cmd_run(args) -> int:
    try:
        with open(args.spec) as fh:
            doc = json.load(fh)
        spec = parse_run_spec(doc)
        if args.seed is not None:
            spec["seed"] = args.seed
        traj, report = run_from_spec(spec)
    except (SpecError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        traj_path = args.out_traj or spec["outputs"].get("trajectory")
        diag_path = args.out_diag or spec["outputs"].get("diagnostics")
        if traj_path:
            io.save_trajectory(traj, traj_path)
        if diag_path:
            io.save_diagnostics(report, diag_path)
        else:
            print(json.dumps(report.to_dict(), indent=2))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_benchmark(args) -> int:
    try:
        with open(args.spec) as fh:
            doc = json.load(fh)
        reps = int(doc.get("repetitions", 3))
        records = []
        for raw in doc["specs"]:
            spec = parse_run_spec(raw)
            params = ModelParams(n=spec["n"], kappa=spec["kappa"], mode=spec["mode"])
            seed = int(spec["seed"]) if spec["seed"] is not None else 0
            positions = initial.generate(
                spec["init"], spec["N"], spec["d"], spec["n"], seed
            )
            sset = None
            if spec["mode"] == "reduced":
                sset = build_topology(spec["topology"], spec["N"], spec["n"])
            records.append(bench.measure(positions, params, sset=sset, repetitions=reps))
    except (SpecError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    text = json.dumps([r.to_dict() for r in records], indent=2)
    if args.out:
        io.atomic_write_text(args.out, text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_diag(args) -> int:
    try:
        with open(args.spec) as fh:
            spec = parse_run_spec(json.load(fh))
        times, snapshots = io.load_trajectory(args.traj)
        params = ModelParams(n=spec["n"], kappa=spec["kappa"], mode=spec["mode"])
        traj = dynamics.Trajectory()
        sset = None
        if spec["mode"] == "reduced":
            sset = build_topology(spec["topology"], spec["N"], spec["n"])
        from .potential import potential_full, potential_reduced

        seed = int(spec["seed"]) if spec["seed"] is not None else 0
        monitor = diagnostics.volume_monitor(
            snapshots[0].shape[0], spec["n"],
            budget=spec["volume_budget"], seed=seed,
        )
        for t, snap in zip(times, snapshots):
            pot = (
                potential_reduced(snap, sset, params)
                if sset is not None
                else potential_full(snap, params)
            )
            traj.append(t, snap, pot, diagnostics.mean_simplex_volume(snap, spec["n"], monitor))
        dt = spec["integrator"].get("dt")
        report = diagnostics.check_trajectory(traj, params, dt=dt)
    except (SpecError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.out_diag:
        io.save_diagnostics(report, args.out_diag)
    else:
        print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def _cmd_topology(args) -> int:
    try:
        if args.validate:
            sset = load_topology(args.validate)
            problems = validate(sset)
            if problems:
                for p in problems:
                    print(p)
                return EXIT_VALIDATION
            print(f"ok: {len(sset.simplices)} simplices, |S| = {sset.ordered_size}")
            return EXIT_OK
        if args.kind == "full":
            sset = full_set(args.N, args.n)
        elif args.kind == "base-point":
            bases = [
                [int(v) - 1 for v in chunk.split(",")]
                for chunk in args.bases.split(";")
            ]
            sset = base_point_set(bases, args.N, n=args.n)
        else:
            print(f"error: unknown topology kind {args.kind!r}", file=sys.stderr)
            return EXIT_VALIDATION
        save_topology(sset, args.out)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexflow",
        description="n-simplex volume consensus gradient flows",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a run spec")
    p_run.add_argument("--spec", required=True)
    p_run.add_argument("--out-traj", default=None)
    p_run.add_argument("--out-diag", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument(
        "--deterministic", action="store_true",
        help="accepted for compatibility; runs are deterministic by construction",
    )
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("benchmark", help="measure per-step cost of run specs")
    p_bench.add_argument("--spec", required=True)
    p_bench.add_argument("--out", default=None)
    p_bench.set_defaults(func=_cmd_benchmark)

    p_diag = sub.add_parser("diag", help="re-run diagnostics on a stored trajectory")
    p_diag.add_argument("--traj", required=True)
    p_diag.add_argument("--spec", required=True)
    p_diag.add_argument("--out-diag", default=None)
    p_diag.set_defaults(func=_cmd_diag)

    p_topo = sub.add_parser("topology", help="generate or validate topology files")
    p_topo.add_argument("--validate", default=None, metavar="FILE")
    p_topo.add_argument("--kind", choices=["full", "base-point"], default="full")
    p_topo.add_argument("--N", type=int, default=None)
    p_topo.add_argument("--n", type=int, default=None)
    p_topo.add_argument("--bases", default=None, help="1-based, e.g. '1,2' or '1,2;3,4'")
    p_topo.add_argument("--out", default=None)
    p_topo.set_defaults(func=_cmd_topology)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
