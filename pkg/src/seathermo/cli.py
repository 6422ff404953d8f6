"""Command-line front end: config ingestion, subcommands, deterministic output.

Every subcommand accepts ``--config PATH`` (JSON), ``--seed INT`` and
``--out PATH``; explicit flags override config fields. Exit status is 0 on
success, 2 for usage or configuration errors and 3 when a numerical
procedure aborts.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .core import NORM_TOL, EnergySpectrum, ModelConstants, StateError, energy, entropy, validate_state
from .criteria import candidate_by_name, run_criteria
from .equilibrium import beta_from_energy, canonical_distribution
from .sea_dynamics import IntegrationError, IntegratorConfig, integrate
from .statespace import concavity_violation, demon_check, smax_curve

log = logging.getLogger("seathermo")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
#: largest second-difference excess tolerated before a diagram is refused
DIAGRAM_CONCAVITY_TOL = 1e-8


class ConfigError(Exception):
    pass


# --- serialization ----------------------------------------------------------

def fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return "%.17g" % x


def _jsonable(obj):
    # non-finite floats become strings so the output stays strict JSON
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def trajectory_csv(traj) -> str:
    n = len(traj.spectrum)
    head = ["t"] + [f"p_{j}" for j in range(1, n + 1)] + ["E", "S", "dSdt"]
    rows = [",".join(head)]
    for pt in traj.points:
        vals = [pt.t, *pt.state.probs, pt.energy, pt.entropy, pt.entropy_rate]
        rows.append(",".join(fmt(v) for v in vals))
    return "\n".join(rows) + "\n"


# --- config -----------------------------------------------------------------

def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise ConfigError(f"could not parse {what}: {text!r}") from None


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def build_spectrum(spec, rng: np.random.Generator) -> EnergySpectrum:
    if spec is None:
        raise ConfigError("no spectrum given (config 'spectrum' or --levels)")
    if isinstance(spec, dict):
        r = spec.get("random")
        if not isinstance(r, dict):
            raise ConfigError("spectrum object must be {'random': {n, low, high}}")
        levels = np.sort(rng.uniform(float(r.get("low", 0.0)), float(r.get("high", 10.0)), int(r["n"])))
        return EnergySpectrum(levels)
    try:
        return EnergySpectrum(np.asarray(spec, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad spectrum: {exc}") from None


def build_state(spec, spectrum: EnergySpectrum, rng: np.random.Generator):
    """Lenient ingestion: off-normalized vectors are rescaled with a warning."""
    n = len(spectrum)
    if spec is None:
        raise ConfigError("no initial state given")
    if isinstance(spec, dict):
        keys = set(spec) & {"canonical", "uniform", "random"}
        if len(keys) != 1 or len(spec) != 1:
            raise ConfigError("initial state needs exactly one of 'canonical', 'uniform', 'random' or a list")
        key = keys.pop()
        if key == "canonical":
            return canonical_distribution(float(spec[key]), spectrum)
        if key == "uniform":
            support = list(range(n)) if spec[key] in (None, "all") else [int(i) for i in spec[key]]
            if not support or min(support) < 0 or max(support) >= n:
                raise ConfigError(f"uniform support out of range for {n} levels")
            p = np.zeros(n)
            p[support] = 1.0 / len(support)
            return validate_state(p)
        opts = spec[key] if isinstance(spec[key], dict) else {}
        support = opts.get("support", list(range(n)))
        p = np.zeros(n)
        p[support] = rng.dirichlet(np.ones(len(support)))
        return validate_state(p, strict=False)
    p = np.asarray(spec, dtype=float)
    if p.shape != (n,):
        raise ConfigError(f"initial state has {p.size} entries, spectrum has {n}")
    if abs(p.sum() - 1.0) > NORM_TOL:
        log.warning("initial state sums to %r; normalizing", float(p.sum()))
    return validate_state(p, strict=False)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _flag_overrides(args) -> dict:
    over: dict = {}
    if getattr(args, "levels", None):
        over["spectrum"] = _parse_floats(args.levels, "levels")
    if getattr(args, "initial", None):
        over["initial"] = _parse_floats(args.initial, "initial state")
    integ = {}
    for name in ("method", "t_end", "step", "tolerance", "sample_stride"):
        v = getattr(args, name, None)
        if v is not None:
            integ[name] = v
    if integ:
        over["integrator"] = integ
    consts = {n: getattr(args, n) for n in ("k", "tau") if getattr(args, n, None) is not None}
    if consts:
        over["constants"] = consts
    return over


# --- simulate ---------------------------------------------------------------

def simulate(cfg: dict, seed: int):
    """Run one configured simulation; returns ``(trajectory, summary)``."""
    rng = np.random.default_rng(seed)
    spectrum = build_spectrum(cfg.get("spectrum"), rng)
    state = build_state(cfg.get("initial"), spectrum, rng)
    try:
        constants = ModelConstants(**cfg.get("constants", {}))
        config = IntegratorConfig(**cfg.get("integrator", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    traj = integrate(state, spectrum, constants, config)
    return traj, summarize(traj)


def summarize(traj) -> dict:
    """Summary statistics, each recomputable from the trajectory rows."""
    first = traj.points[0]
    support = first.state.support
    E0 = first.energy
    sub = traj.spectrum.levels[list(support)]
    E0c = min(max(E0, float(sub.min())), float(sub.max()))
    # target is canonical over the (frozen) initial support
    sol = beta_from_energy(E0c, traj.spectrum, support, k=traj.constants.k)
    final = traj.final.state.probs
    return {
        "final_state": final.tolist(),
        "beta_of_E": sol.beta,
        "L_inf_to_canonical": float(np.max(np.abs(final - sol.distribution.probs))),
        "max_energy_drift": float(np.max(np.abs(traj.energies - E0))),
        "min_dSdt": float(np.min(traj.entropy_rates)),
    }


def _summary_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix != ".json" else out.with_name(out.stem + ".summary.json")


def cmd_simulate(args) -> int:
    cfg = _merge(load_config(args.config), _flag_overrides(args))
    traj, summary = simulate(cfg, args.seed)
    out = args.out or (Path(cfg["outputs"]["trajectory"]) if "outputs" in cfg else None)
    _emit(trajectory_csv(traj), out)
    if out is None:
        sys.stderr.write(dumps(summary))
    else:
        _emit(dumps(summary), _summary_path(Path(out)))
    return EXIT_OK


def _sweep_point(job):
    cfg, seed, out = job
    traj, summary = simulate(cfg, seed)
    _emit(trajectory_csv(traj), out)
    _emit(dumps(summary), _summary_path(out))
    return out.name, summary


def cmd_sweep(args) -> int:
    """Independent simulations from ``{"base": {...}, "points": [{...}, ...]}``."""
    cfg = load_config(args.config)
    points = cfg.get("points")
    if not isinstance(points, list) or not points:
        raise ConfigError("sweep config needs a non-empty 'points' list")
    base = _merge(cfg.get("base", {}), _flag_overrides(args))
    outdir = Path(args.out or "sweep")
    jobs = [(_merge(base, pt), args.seed + i, outdir / f"point_{i:03d}.csv") for i, pt in enumerate(points)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            done = list(pool.map(_sweep_point, jobs))
    else:
        done = [_sweep_point(j) for j in jobs]
    index = [{"trajectory": path, "summary": summ} for path, summ in done]
    _emit(dumps({"points": index, "seed": args.seed}), outdir / "sweep.json")
    return EXIT_OK


# --- equilibrium, diagram, demon ---------------------------------------------

def _levels(args, cfg) -> EnergySpectrum:
    spec = _parse_floats(args.levels, "levels") if args.levels else cfg.get("spectrum")
    return build_spectrum(spec, np.random.default_rng(args.seed))


def cmd_equilibrium(args) -> int:
    cfg = load_config(args.config)
    spectrum = _levels(args, cfg)
    E = args.energy if args.energy is not None else cfg.get("energy")
    if E is None:
        raise ConfigError("no energy given (--energy)")
    k = float(cfg.get("constants", {}).get("k", 1.0))
    sol = beta_from_energy(float(E), spectrum, k=k)
    rec = {
        "beta": sol.beta,
        "temperature": sol.temperature,
        "Z": sol.partition_function.value,
        "log_Z": sol.partition_function.log_value,
        "distribution": sol.distribution.probs.tolist(),
        "entropy": sol.entropy,
    }
    _emit(dumps(rec), args.out)
    return EXIT_OK


def diagram_svg(curve, width: int = 480, height: int = 320, pad: int = 40) -> str:
    """Boundary ``S_max(E)`` and the ``S = 0`` floor as plain SVG polylines."""
    E, S = curve.energies, curve.entropies
    lo, hi = curve.spectrum.min, curve.spectrum.max
    top = float(S.max()) or 1.0
    # close the curve onto the zero-temperature corners
    E = np.concatenate([[lo], E, [hi]])
    S = np.concatenate([[curve.smax(lo)], S, [curve.smax(hi)]])

    def xy(e, s):
        x = pad + (e - lo) / (hi - lo) * (width - 2 * pad)
        y = height - pad - s / top * (height - 2 * pad)
        return f"{x:.3f},{y:.3f}"

    boundary = " ".join(xy(e, s) for e, s in zip(E, S))
    floor = f"{xy(lo, 0.0)} {xy(hi, 0.0)}"
    x0, y0 = pad, height - pad
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'  <line x1="{x0}" y1="{y0}" x2="{width - pad}" y2="{y0}" stroke="black"/>\n'
        f'  <line x1="{x0}" y1="{y0}" x2="{x0}" y2="{pad}" stroke="black"/>\n'
        f'  <text x="{width - pad}" y="{y0 + 20}" text-anchor="end">E</text>\n'
        f'  <text x="{x0 - 10}" y="{pad}" text-anchor="end">S</text>\n'
        f'  <polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{boundary}"/>\n'
        f'  <polyline fill="none" stroke="firebrick" stroke-width="1.5" points="{floor}"/>\n'
        "</svg>\n"
    )


def cmd_diagram(args) -> int:
    cfg = load_config(args.config)
    spectrum = _levels(args, cfg)
    if spectrum.distinct().size < 2:
        raise ConfigError("diagram needs at least two distinct levels")
    curve = smax_curve(spectrum, n_samples=args.samples or int(cfg.get("samples", 512)))
    gap = concavity_violation(curve)
    if gap > DIAGRAM_CONCAVITY_TOL:
        log.error("sampled boundary not concave (excess %.3g)", gap)
        return EXIT_NUMERIC
    rows = ["E,S,beta"] + [",".join(fmt(v) for v in row) for row in curve.samples]
    _emit("\n".join(rows) + "\n", args.out)
    if args.svg:
        _emit(diagram_svg(curve), Path(args.svg))
    return EXIT_OK


def cmd_demon(args) -> int:
    cfg = load_config(args.config)
    spectrum = _levels(args, cfg)
    curve = smax_curve(spectrum)
    if args.point:
        E, S = _parse_floats(args.point, "point")
    else:
        spec = _parse_floats(args.state, "state") if args.state else cfg.get("initial")
        state = build_state(spec, spectrum, np.random.default_rng(args.seed))
        E, S = energy(state, spectrum), entropy(state)
    try:
        v = demon_check(E, S, curve)
    except StateError as exc:
        raise ConfigError(str(exc)) from None
    rec = {
        "energy": E,
        "entropy": S,
        "feasible": v.feasible,
        "branch": v.branch,
        "witness_energy": v.witness_energy,
        "witness_entropy": v.witness_entropy,
        "witness_distribution": None if v.witness is None else v.witness.probs.tolist(),
    }
    _emit(dumps(rec), args.out)
    return EXIT_OK


# --- criteria ---------------------------------------------------------------

def cmd_criteria(args) -> int:
    cfg = load_config(args.config)
    name = args.candidate or cfg.get("candidate", "shannon")
    try:
        cand = candidate_by_name(name, q=args.q, alpha=args.alpha)
    except KeyError:
        raise ConfigError(f"unknown candidate {name!r}") from None
    levels = _parse_floats(args.levels, "levels") if args.levels else cfg.get("spectrum", [0.0, 1.0, 2.0])
    trials = args.trials or int(cfg.get("trials", 200))
    report = run_criteria(cand, levels, trials=trials, seed=args.seed)
    if args.out is None:
        sys.stdout.write(report.to_json())
        sys.stderr.write(report.table())
    else:
        _emit(report.to_json(), args.out)
        _emit(report.table(), args.out.with_suffix(".txt"))
        sys.stdout.write(report.table())
    return EXIT_OK


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", type=Path, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="seathermo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def dyn_flags(sp):
        sp.add_argument("--levels", help="comma-separated energy levels")
        sp.add_argument("--initial", help="comma-separated initial probabilities")
        sp.add_argument("--method", choices=["rk4", "rk45"])
        sp.add_argument("--t-end", dest="t_end", type=float, help="end time in units of tau")
        sp.add_argument("--step", type=float, help="RK4 step in units of tau")
        sp.add_argument("--tolerance", type=float)
        sp.add_argument("--sample-stride", dest="sample_stride", type=int)
        sp.add_argument("--tau", type=float)
        sp.add_argument("--k", type=float)

    s = sub.add_parser("simulate", parents=[common], help="integrate the SEA equation of motion")
    dyn_flags(s)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="run independent simulations from a sweep config")
    dyn_flags(s)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("equilibrium", parents=[common], help="stable state at a given energy")
    s.add_argument("--levels")
    s.add_argument("--energy", type=float)
    s.set_defaults(func=cmd_equilibrium)

    s = sub.add_parser("diagram", parents=[common], help="sampled S_max(E) boundary as CSV")
    s.add_argument("--levels")
    s.add_argument("--samples", type=int)
    s.add_argument("--svg", help="also write an SVG rendering here")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("demon", parents=[common], help="lower-energy, no-lower-entropy feasibility")
    s.add_argument("--levels")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--state", help="comma-separated probabilities")
    g.add_argument("--point", help="E,S coordinates")
    s.set_defaults(func=cmd_demon)

    s = sub.add_parser("criteria", parents=[common], help="test an entropy candidate against the criteria")
    s.add_argument("--candidate")
    s.add_argument("--q", type=float, default=2.0)
    s.add_argument("--alpha", type=float, default=2.0)
    s.add_argument("--levels")
    s.add_argument("--trials", type=int)
    s.set_defaults(func=cmd_criteria)
    return p


def main(argv=None) -> int:
    logging.basicConfig(format="seathermo: %(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, StateError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except IntegrationError as exc:
        log.error("integration aborted: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
