"""
semwave - Main Entry Point.
Command-line harness wiring the semantic wave modules into reproducible runs.
"""

import argparse
import json
import logging
import math
import os
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import ALPHA, BETA, GRID_POINTS, LOG_LEVEL, OUTPUT_DIR, RECORD_EVERY, TAU, TIME_STEP
from embedding_geometry import (
    EmbeddingFormat, cosine_similarity, load_embeddings, pca_project, rank_similarities,
    save_embeddings, scan_balanced_tokens,
)
from gauge_effective_action import (
    GreensSign, GreensSpec, Nonlinearity, effective_action, greens_function, solve_scalar_potential,
)
from interference import embedding_interference, embedding_waves, intensity_sweep
from potential_landscape import (
    DoubleWellParams, MexicanHatParams, break_symmetry, double_well_on_grid, sample_grid,
    vacuum_diagnostics,
)
from provider_client import ProviderConfig, fetch_embeddings
from semantic_state import (
    MagnitudeRule, MeasurementRecord, complex_similarity, complexify, estimate_amplitudes,
    measure_probabilities, sample_measurements,
)
from utils import SemwaveError, Table, OutputWriter, emit_outputs, make_rng
from wave_dynamics import (
    EvolutionConfig, Grid, charge_conservation_report, evolve, gaussian_packet,
    save_snapshot, sech_profile, tunneling_period,
)

logger = logging.getLogger("semwave")

FIXTURE_EMBEDDINGS = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                  "fixtures", "embeddings.jsonl")

# Keys that never reach the manifest or config files
INTERNAL_KEYS = {"command", "config", "jobs", "verbose"}


class UsageError(Exception):
    """Invalid command line or configuration (exit code 2)."""
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# ============================================================
# Validation
# ============================================================

def _positive(value) -> bool:
    return value is not None and math.isfinite(value) and value > 0


def _non_negative(value) -> bool:
    return value is not None and math.isfinite(value) and value >= 0


CHECKS: Dict[str, Tuple[Callable[[Any], bool], str]] = {
    "dt": (_positive, "must be > 0"),
    "length": (_positive, "must be > 0"),
    "points": (lambda n: n is not None and n >= 2, "must be >= 2"),
    "steps": (_non_negative, "must be >= 0"),
    "record_every": (lambda n: n is not None and n >= 1, "must be >= 1"),
    "sigma": (_positive, "must be > 0"),
    "tau": (_positive, "must be > 0"),
    "c": (_positive, "must be > 0"),
    "v": (_positive, "must be > 0"),
    "mu2": (_positive, "must be > 0"),
    "lam": (_positive, "must be > 0"),
    "seed": (_non_negative, "must be >= 0"),
    "dims": (lambda n: n is not None and n >= 1, "must be >= 1"),
    "max_len": (lambda n: n is not None and n >= 1, "must be >= 1"),
    "shots": (_non_negative, "must be >= 0"),
    "tol": (_positive, "must be > 0"),
    "samples": (lambda n: n is not None and n >= 2, "must be >= 2"),
    "r_min": (_positive, "must be > 0"),
}


def validate(args: argparse.Namespace) -> None:
    """Check every numeric parameter against its precondition."""
    for name, (check, reason) in CHECKS.items():
        if hasattr(args, name):
            value = getattr(args, name)
            try:
                ok = check(value)
            except TypeError:
                ok = False
            if not ok:
                raise UsageError(f"invalid value for {name}: {value!r} ({reason})")
    if getattr(args, "command", None) == "evolve" and args.dims == 2 and args.points > 256:
        raise UsageError(f"invalid value for points: {args.points} (2D grids are capped at 256)")
    if getattr(args, "command", None) == "greens" and not args.r_max > args.r_min:
        raise UsageError("invalid value for r_max: must exceed r_min")


# ============================================================
# Subcommand handlers
# ============================================================

def _embeddings(args):
    return load_embeddings(args.embeddings, args.embeddings_format)


def _provider_config(args) -> ProviderConfig:
    return ProviderConfig.from_env(
        endpoint=args.endpoint, model=args.model, backend=args.backend,
        max_in_flight=args.max_in_flight, cache_dir=args.cache_dir,
        credential_env=args.credential_env,
    )


def cmd_similarity(args, writer: OutputWriter) -> Tuple[Dict[str, Any], List[str]]:
    embeddings = _embeddings(args)
    value = cosine_similarity(embeddings.vector(args.a), embeddings.vector(args.b))
    results: Dict[str, Any] = {"similarity": {"a": args.a, "b": args.b, "cosine_similarity": value}}
    if args.rank:
        ranking = rank_similarities(embeddings, args.a)
        results["ranking"] = Table(["token", "cosine_similarity"], ranking)
    if args.pca:
        results["pca"] = pca_project(embeddings, args.pca)
    return results, [repr(value)]


def cmd_complexify(args, writer: OutputWriter):
    embeddings = _embeddings(args)
    basis = [t for t in args.basis.split(",") if t]
    rule = MagnitudeRule(args.rule)
    state = complexify(args.target, basis, embeddings, beta=args.beta, magnitude_rule=rule, tau=args.tau)
    results: Dict[str, Any] = {
        "state": state,
        "probabilities": measure_probabilities(state),
    }
    lines = [json.dumps(state.to_dict(), sort_keys=True)]
    if args.compare:
        other = complexify(args.compare, basis, embeddings, beta=args.beta, magnitude_rule=rule, tau=args.tau)
        similarity = complex_similarity(state, other)
        results["complex_similarity"] = {"magnitude": similarity.magnitude, "phase": similarity.phase}
        lines.append(f"S_T magnitude {similarity.magnitude!r} phase {similarity.phase!r}")
    if args.shots:
        record = sample_measurements(state, args.shots, make_rng(args.seed))
        results["measurements"] = record
    return results, lines


def cmd_estimate(args, writer: OutputWriter):
    counts = {}
    for item in args.counts.split(","):
        label, sep, count = item.rpartition("=")
        if not sep or not label:
            raise UsageError(f"invalid value for counts: {item!r} (expected label=count)")
        try:
            counts[label] = int(count)
        except ValueError:
            raise UsageError(f"invalid value for counts: {item!r} (count must be an integer)") from None
    record = MeasurementRecord(counts)
    state = estimate_amplitudes(record)
    frequencies = {label: str(f) for label, f in record.frequencies().items()}
    results = {"state": state, "frequencies": frequencies}
    return results, [f"{label}: {f}" for label, f in frequencies.items()]


def cmd_interfere(args, writer: OutputWriter):
    embeddings = _embeddings(args)
    v1, v2 = embeddings.vector(args.a), embeddings.vector(args.b)
    result = embedding_interference(v1, v2, args.a1, args.a2, alpha=args.alpha, beta=args.beta)
    results: Dict[str, Any] = {"interference": result}
    if args.sweep:
        w1, w2 = embedding_waves(v1, v2, args.a1, args.a2, alpha=args.alpha, beta=args.beta)
        direction = v1.values - v2.values
        norm = np.linalg.norm(direction)
        unit = direction / norm if norm > 0 else np.zeros_like(direction)
        points = [s * unit for s in np.linspace(-args.span, args.span, args.sweep)]
        results["sweep"] = intensity_sweep(w1, w2, points)
    return results, [repr(result.total)]


def _initial_field(args, grid: Grid):
    if args.initial == "sech":
        return sech_profile(grid, amplitude=args.amplitude, center=args.center)
    center = [args.center] * grid.ndim
    momentum = [args.momentum] + [0.0] * (grid.ndim - 1)
    return gaussian_packet(grid, center, args.sigma, momentum)


def _potential(args, grid: Grid) -> Optional[np.ndarray]:
    if args.potential == "none":
        return None
    if args.potential == "harmonic":
        return 0.5 * args.omega ** 2 * sum(x * x for x in grid.mesh())
    if grid.ndim != 1:
        raise UsageError("invalid value for potential: double_well needs dims = 1")
    return double_well_on_grid(DoubleWellParams(args.c, args.v), grid)


def _grid(args) -> Grid:
    return Grid((args.length,) * args.dims, (args.points,) * args.dims)


def cmd_evolve(args, writer: OutputWriter):
    if args.dims not in (1, 2):
        raise UsageError(f"invalid value for dims: {args.dims} (evolution runs in 1 or 2 dimensions)")
    grid = _grid(args)
    field = _initial_field(args, grid)
    config = EvolutionConfig(
        dt=args.dt, steps=args.steps, gamma=args.gamma, potential=_potential(args, grid),
        record_every=args.record_every, occupancy_split=args.split,
    )
    final, series = evolve(field, config)
    report = charge_conservation_report(series, args.tol)
    writer.written.extend(save_snapshot(final, os.path.join(args.out, "final_field")))
    results = {"series": series, "charge": report}
    return results, [f"t={final.time!r} norm drift {report.max_relative_drift!r} ({report.verdict.value})"]


def cmd_tunnel(args, writer: OutputWriter):
    grid = Grid((args.length,), (args.points,))
    result = tunneling_period(DoubleWellParams(args.c, args.v), grid, args.dt,
                              max_steps=args.max_steps, initial=args.initial)
    return {"tunneling": result}, [f"T_measured {result.t_measured!r} T_spectral {result.t_spectral!r}"]


def cmd_greens(args, writer: OutputWriter):
    spec = GreensSpec(args.dims, GreensSign(args.sign))
    radii = np.linspace(args.r_min, args.r_max, args.samples)
    values = greens_function(spec, radii)
    table = Table(["r", "G"], zip(radii.tolist(), values.tolist()))
    return {"greens": table}, [f"G({args.r_min!r}) = {float(values[0])!r}"]


def cmd_action(args, writer: OutputWriter):
    if args.dims not in (1, 2):
        raise UsageError(f"invalid value for dims: {args.dims} (trajectories evolve in 1 or 2 dimensions)")
    grid = _grid(args)
    field = _initial_field(args, grid)
    if args.nonlinearity == "cubic":
        nonlinearity, gamma = Nonlinearity.cubic(args.gamma), args.gamma
    elif args.nonlinearity == "mexican_hat":
        nonlinearity, gamma = Nonlinearity.mexican_hat(args.mu2, args.lam), 0.0
    else:
        nonlinearity, gamma = Nonlinearity.none(), 0.0
    config = EvolutionConfig(dt=args.dt, steps=args.steps, gamma=gamma,
                             record_every=args.record_every, keep_snapshots=True)
    _, series = evolve(field, config)
    if len(series.snapshots) < 2:
        raise UsageError("invalid value for steps: the trajectory needs at least 2 snapshots")
    spec = GreensSpec(grid.ndim, GreensSign(args.sign))
    a0 = solve_scalar_potential(field.density(), grid, spec) if args.mean_field else None
    breakdown, total = effective_action(series.snapshots, A0=a0, nonlinearity=nonlinearity,
                                        spec=spec, include_nonlocal=getattr(args, "nonlocal"))
    return {"action": breakdown}, [f"S = {total!r}"]


def cmd_scan(args, writer: OutputWriter):
    if args.fetch:
        config = _provider_config(args)
        source = lambda tokens: fetch_embeddings(config, tokens)  # noqa: E731
    else:
        source = _embeddings(args)
    result = scan_balanced_tokens(source, args.a, args.b, args.alphabet, args.max_len, args.cap)
    lines = [f"length {n}: {cand} {delta!r}" for n, (cand, delta) in result.best_per_length.items()]
    return {"scan": result}, lines


def cmd_fetch(args, writer: OutputWriter):
    if args.tokens_file:
        with open(args.tokens_file, "r", encoding="utf-8") as f:
            tokens = [line.rstrip("\n") for line in f if line.strip()]
    else:
        tokens = [t for t in (args.tokens or "").split(",") if t]
    if not tokens:
        raise UsageError("invalid value for tokens: no tokens given")
    config = _provider_config(args)
    embeddings = fetch_embeddings(config, tokens)
    fmt = EmbeddingFormat(args.save_format)
    extension = {"jsonl": "jsonl", "csv": "csv", "binary": "bin"}[fmt.value]
    path = save_embeddings(embeddings, os.path.join(args.out, f"embeddings.{extension}"), fmt)
    writer.written.append(path)
    summary = {"model": embeddings.model_id, "dim": embeddings.dim, "tokens": embeddings.tokens,
               "provider": {k: v for k, v in config.to_dict().items() if k != "credential_env"}}
    return {"fetch": summary}, [f"{len(embeddings)} embeddings written to {path}"]


def cmd_vacuum(args, writer: OutputWriter):
    params = MexicanHatParams(args.mu2, args.lam)
    vacuum = break_symmetry(params, args.seed)
    results = {
        "vacuum": vacuum_diagnostics(params, vacuum),
        "potential": sample_grid(args.kind, params if args.kind == "mexican_hat"
                                 else DoubleWellParams(args.c, args.v),
                                 args.lo, args.hi, args.samples),
    }
    return results, [f"|v| = {vacuum.magnitude!r} theta = {vacuum.theta!r}"]


HANDLERS = {
    "similarity": cmd_similarity,
    "complexify": cmd_complexify,
    "estimate": cmd_estimate,
    "interfere": cmd_interfere,
    "evolve": cmd_evolve,
    "tunnel": cmd_tunnel,
    "greens": cmd_greens,
    "action": cmd_action,
    "scan": cmd_scan,
    "fetch": cmd_fetch,
    "vacuum": cmd_vacuum,
}


# ============================================================
# Parser
# ============================================================

def _add_embedding_args(p):
    p.add_argument("--embeddings", default=FIXTURE_EMBEDDINGS, help="embedding file")
    p.add_argument("--embeddings-format", default="jsonl", choices=[f.value for f in EmbeddingFormat])


def _add_provider_args(p):
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--backend", choices=["http", "gemini"])
    p.add_argument("--max-in-flight", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--credential-env")


def _add_grid_args(p, length=40.0, points=GRID_POINTS):
    p.add_argument("--dims", type=int, default=1)
    p.add_argument("--length", type=float, default=length, help="domain extent per axis")
    p.add_argument("--points", type=int, default=points, help="samples per axis")


def _add_initial_args(p):
    p.add_argument("--initial", choices=["gaussian", "sech"], default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--momentum", type=float, default=0.0)
    p.add_argument("--amplitude", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    """Build the semwave argument parser."""
    common = _Parser(add_help=False)
    common.add_argument("--config", action="append", default=[],
                        help="TOML or JSON run configuration (repeat for batch mode)")
    common.add_argument("--out", default=OUTPUT_DIR, help="output directory")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="concurrent configurations")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="semwave", description="Semantic wave-function toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("similarity", parents=[common], help="cosine similarity of two tokens")
    _add_embedding_args(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--rank", action="store_true", help="rank every token against --a")
    p.add_argument("--pca", type=int, default=0, help="project onto K principal components")

    p = sub.add_parser("complexify", parents=[common], help="complex state of a token")
    _add_embedding_args(p)
    p.add_argument("--target", required=True)
    p.add_argument("--basis", required=True, help="comma-separated basis tokens")
    p.add_argument("--beta", type=float, default=BETA)
    p.add_argument("--tau", type=float, default=TAU)
    p.add_argument("--rule", choices=[r.value for r in MagnitudeRule], default="softmax")
    p.add_argument("--compare", help="second target for the complex similarity")
    p.add_argument("--shots", type=int, default=0, help="simulated measurements")

    p = sub.add_parser("estimate", parents=[common], help="amplitudes from outcome counts")
    p.add_argument("--counts", required=True, help="label=count pairs, comma-separated")

    p = sub.add_parser("interfere", parents=[common], help="two-wave interference of embeddings")
    _add_embedding_args(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--a1", type=float, default=1.0)
    p.add_argument("--a2", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=ALPHA)
    p.add_argument("--beta", type=float, default=BETA)
    p.add_argument("--sweep", type=int, default=0, help="points along v1 - v2")
    p.add_argument("--span", type=float, default=math.pi)

    p = sub.add_parser("evolve", parents=[common], help="split-step evolution")
    _add_grid_args(p)
    _add_initial_args(p)
    p.add_argument("--dt", type=float, default=TIME_STEP)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--potential", choices=["none", "harmonic", "double_well"], default="none")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--v", type=float, default=1.5)
    p.add_argument("--record-every", type=int, default=RECORD_EVERY)
    p.add_argument("--split", type=float, default=None, help="occupancy split coordinate")
    p.add_argument("--tol", type=float, default=1e-6, help="charge conservation tolerance")

    p = sub.add_parser("tunnel", parents=[common], help="double-well tunneling time")
    _add_grid_args(p, length=12.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--v", type=float, default=1.5)
    p.add_argument("--dt", type=float, default=TIME_STEP)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--initial", choices=["left", "symmetric"], default="left")

    p = sub.add_parser("greens", parents=[common], help="Laplacian Green's function samples")
    p.add_argument("--dims", type=int, default=3)
    p.add_argument("--sign", choices=[s.value for s in GreensSign], default="standard")
    p.add_argument("--r-min", type=float, default=0.5)
    p.add_argument("--r-max", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=10)

    p = sub.add_parser("action", parents=[common], help="effective action of a trajectory")
    _add_grid_args(p, length=20.0, points=64)
    _add_initial_args(p)
    p.add_argument("--dt", type=float, default=TIME_STEP)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--nonlinearity", choices=["none", "cubic", "mexican_hat"], default="none")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--mu2", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.25)
    p.add_argument("--sign", choices=[s.value for s in GreensSign], default="standard")
    p.add_argument("--mean-field", action="store_true", help="couple to the solved A0")
    p.add_argument("--nonlocal", action="store_true", help="include the Coulomb term")

    p = sub.add_parser("scan", parents=[common], help="balanced-token scan")
    _add_embedding_args(p)
    _add_provider_args(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--alphabet", default="abcdefghijklmnopqrstuvwxyz")
    p.add_argument("--max-len", type=int, default=1)
    p.add_argument("--cap", type=int, default=500_000)
    p.add_argument("--fetch", action="store_true", help="resolve candidates through the provider")

    p = sub.add_parser("fetch", parents=[common], help="fetch embeddings from the provider")
    _add_provider_args(p)
    p.add_argument("--tokens", help="comma-separated tokens")
    p.add_argument("--tokens-file", help="one token per line")
    p.add_argument("--save-format", choices=[f.value for f in EmbeddingFormat], default="jsonl")

    p = sub.add_parser("vacuum", parents=[common], help="Mexican-hat symmetry breaking")
    p.add_argument("--mu2", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.25)
    p.add_argument("--kind", choices=["mexican_hat", "double_well"], default="mexican_hat")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--v", type=float, default=1.5)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=101)

    parser.subcommands = sub.choices
    return parser


# ============================================================
# Config files and execution
# ============================================================

def load_config_file(path: str) -> Dict[str, Any]:
    """Read a TOML or JSON run configuration into flat argument names."""
    try:
        if path.endswith(".toml"):
            with open(path, "rb") as f:
                data = tomllib.load(f)
        elif path.endswith(".json"):
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        else:
            raise UsageError(f"invalid config file {path}: expected .toml or .json")
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}") from e
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise UsageError(f"invalid config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise UsageError(f"invalid config file {path}: top level must be a table")
    return {key.replace("-", "_"): value for key, value in data.items()}


def resolve(argv: List[str]) -> List[argparse.Namespace]:
    """
    Parse argv into one namespace per configuration file (or one without).
    File values act as defaults; flags given on the command line win.
    """
    args = build_parser().parse_args(argv)
    if not args.config:
        validate(args)
        return [args]

    resolved = []
    stems: Dict[str, int] = {}
    for path in args.config:
        values = load_config_file(path)
        parser = build_parser()
        subparser = parser.subcommands[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(values) - known - {"command"})
        if unknown:
            raise UsageError(f"invalid config file {path}: unknown parameter(s) {', '.join(unknown)}")
        values.pop("command", None)
        subparser.set_defaults(**values)
        run_args = parser.parse_args(argv)
        run_args.config = [path]
        if len(args.config) > 1:
            stem = os.path.splitext(os.path.basename(path))[0]
            count = stems.get(stem, 0)
            stems[stem] = count + 1
            run_args.out = os.path.join(run_args.out, stem if count == 0 else f"{stem}_{count}")
        validate(run_args)
        resolved.append(run_args)
    return resolved


def execute(args: argparse.Namespace) -> List[str]:
    """Run one resolved configuration and write its outputs and manifest."""
    handler = HANDLERS[args.command]
    os.makedirs(args.out, exist_ok=True)
    writer = OutputWriter(args.out)
    results, lines = handler(args, writer)
    emit_outputs(results, args.format, args.out, writer=writer)
    resolved_config = {k: v for k, v in sorted(vars(args).items()) if k not in INTERNAL_KEYS}
    resolved_config["config_file"] = args.config[0] if args.config else None
    writer.write_manifest(args.command, resolved_config, args.seed)
    return lines


def _execute_quiet(args: argparse.Namespace) -> List[str]:
    """Process-pool entry point; logging is configured per worker."""
    setup_logging(args.verbose)
    return execute(args)


def setup_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Exit code: 0 on success, 1 on a runtime error, 2 on a usage error
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        runs = resolve(argv)
    except UsageError as e:
        print(str(e).rstrip("\n"), file=sys.stderr)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)

    setup_logging(runs[0].verbose)
    jobs = max(1, runs[0].jobs)
    try:
        if len(runs) > 1 and jobs > 1:
            logger.info("running %d configurations on %d workers", len(runs), jobs)
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outputs = list(pool.map(_execute_quiet, runs))
        else:
            outputs = [execute(args) for args in runs]
    except UsageError as e:
        print(str(e).rstrip("\n"), file=sys.stderr)
        return 2
    except (SemwaveError, OSError) as e:
        print(f"semwave: error: {e}", file=sys.stderr)
        return 1

    for lines in outputs:
        for line in lines:
            print(line)
    return 0


def main():
    """Main entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
