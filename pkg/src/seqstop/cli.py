"""Command-line interface: design, evaluate, and run sequential trials.

Every command prints one JSON document.  Reals are serialized with six
significant digits; rerunning with identical flags and seed yields
byte-identical output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

from . import dp
from .alternatives import DataDependentTAlt, MixtureAlt, PointAlt, derive_alternative
from .design import DesignResult, cost_multiple, design, effective_n, find_n_star, \
    fixed_design_alt, oc
from .engine import DecisionKind, new_trial, step
from .likelihood import TrialState
from .spec import Family, InfeasibleDesignError, Side, SpecError, TestSpec, \
    UsageError, WaldBoundaries

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_BAD_OBS = 4

_TEST_NAMES = {
    "one-z": Family.ONE_Z,
    "one-t": Family.ONE_T,
    "one-prop": Family.ONE_PROP,
    "two-z": Family.TWO_Z,
    "two-t": Family.TWO_T,
}
_SIDE_NAMES = {"right": Side.RIGHT, "left": Side.LEFT, "two": Side.TWO_SIDED}


def _sig6(x):
    """Round floats to 6 significant digits, recursively."""
    if isinstance(x, bool):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        if x == 0.0:
            return 0.0
        return float(f"{x:.6g}")
    if isinstance(x, dict):
        return {k: _sig6(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_sig6(v) for v in x]
    return x


def _emit(doc: dict, out_path: str | None) -> None:
    text = json.dumps(_sig6(doc), sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--test", required=True, choices=sorted(_TEST_NAMES))
    p.add_argument("--side", default="right", choices=sorted(_SIDE_NAMES))
    p.add_argument("--null", type=float, default=0.0)
    p.add_argument("--sigma0", type=float)
    p.add_argument("--alpha", type=float, default=0.005)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--n-max", type=int)
    p.add_argument("--n1-max", type=int)
    p.add_argument("--n2-max", type=int)


def _build_spec(args, alpha_default: float | None = None) -> TestSpec:
    family = _TEST_NAMES[args.test]
    alpha = args.alpha if alpha_default is None else alpha_default
    kwargs = dict(
        family=family,
        side=_SIDE_NAMES[args.side],
        null_value=args.null,
        alpha=alpha,
        beta=args.beta,
        sigma0=args.sigma0,
    )
    if family in (Family.TWO_Z, Family.TWO_T):
        n1 = args.n1_max if args.n1_max is not None else args.n_max
        n2 = args.n2_max if args.n2_max is not None else args.n_max
        kwargs.update(n1_max=n1, n2_max=n2)
    else:
        kwargs.update(n_max=args.n_max)
    return TestSpec(**kwargs)


def _spec_doc(spec: TestSpec) -> dict:
    doc = {
        "family": spec.family.value,
        "side": spec.side.value,
        "null_value": spec.null_value,
        "alpha": spec.alpha,
        "beta": spec.beta,
    }
    if spec.is_two_sample:
        doc["n1_max"] = spec.n1_max
        doc["n2_max"] = spec.n2_max
    else:
        doc["n_max"] = spec.n_max
    if spec.sigma0 is not None:
        doc["sigma0"] = spec.sigma0
    return doc


def _alt_doc(alt) -> dict:
    if isinstance(alt, tuple):
        return {"right": _alt_doc(alt[0]), "left": _alt_doc(alt[1])}
    if isinstance(alt, PointAlt):
        return {"theta1": alt.theta1, "delta": alt.delta}
    if isinstance(alt, DataDependentTAlt):
        return {"null_value": alt.null_value, "slope": alt.slope, "delta": alt.delta}
    if isinstance(alt, MixtureAlt):
        w = alt.weights
        return {
            "p_low": alt.p_low, "p_high": alt.p_high, "psi": alt.psi,
            "delta_low": alt.delta_low, "delta_high": alt.delta_high,
            "weights": [w[0], w[1]],
        }
    raise SpecError(f"unknown alternative {alt!r}")


def _design_doc(d: DesignResult) -> dict:
    return {
        "spec": _spec_doc(d.spec),
        "boundaries": {"A": d.boundaries.A, "B": d.boundaries.B},
        "gamma": d.gamma,
        "type1_est": d.type1_est,
        "asn_null": d.asn_null,
        "umpbt_alt": _alt_doc(d.alternative),
        "n_reps": d.n_reps,
        "method": d.method,
    }


# ---------------------------------------------------------------------------
# Observation files
# ---------------------------------------------------------------------------

class ObservationFileError(Exception):
    pass


def parse_observations(lines, spec: TestSpec):
    """Parse one observation per line; two-sample lines hold 'a,b' pairs.

    Blank lines and lines starting with '#' are skipped.
    """
    obs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if spec.is_two_sample:
                parts = [p for p in line.replace(",", " ").split() if p]
                if len(parts) != 2:
                    raise ValueError("expected two comma-separated values")
                obs.append((float(parts[0]), float(parts[1])))
            elif spec.family is Family.ONE_PROP:
                v = float(line)
                if v not in (0.0, 1.0):
                    raise ValueError("proportion observations must be 0 or 1")
                obs.append(int(v))
            else:
                obs.append(float(line))
        except ValueError as exc:
            raise ObservationFileError(f"line {lineno}: {exc}") from exc
    return obs


def _obs_checksum(obs) -> str:
    flat = []
    for o in obs:
        if isinstance(o, tuple):
            flat.extend(o)
        else:
            flat.append(o)
    payload = ",".join(repr(float(v)) for v in flat)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Trajectory output
# ---------------------------------------------------------------------------

def _trajectory(trial) -> list[tuple[int, float]]:
    if isinstance(trial, TrialState):
        return list(trial.trajectory)
    merged = {}
    for n, lg in trial.right.trajectory:
        merged[n] = lg
    for n, lg in trial.left.trajectory:
        merged[n] = max(merged.get(n, -math.inf), lg)
    return sorted(merged.items())


def write_plot(path: str, traj, bounds: WaldBoundaries, gamma: float) -> None:
    """CSV (columns n,L,A,B,gamma) or a self-contained SVG by extension."""
    rows = [(n, math.exp(lg), bounds.A, bounds.B, gamma) for n, lg in traj]
    if not path.lower().endswith(".svg"):
        with open(path, "w") as fh:
            fh.write("n,L,A,B,gamma\n")
            for n, lr, a, b, g in rows:
                fh.write(f"{n},{lr:.10g},{a:.10g},{b:.10g},{g:.10g}\n")
        return
    with open(path, "w") as fh:
        fh.write(_svg_plot(traj, bounds, gamma))


def _svg_plot(traj, bounds: WaldBoundaries, gamma: float) -> str:
    width, height, pad = 640, 400, 50
    xs = [n for n, _ in traj] or [1]
    ys = [lg for _, lg in traj]
    log_a, log_b = math.log(bounds.A), math.log(bounds.B)
    levels = [log_a, log_b] + ([math.log(gamma)] if math.isfinite(gamma) else [])
    ymin = min(ys + levels) - 0.5
    ymax = max(ys + levels) + 0.5
    xmin, xmax = 0, max(xs)

    def sx(x):
        return pad + (x - xmin) / max(xmax - xmin, 1) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - ymin) / (ymax - ymin) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for level, color, label in (
        (log_a, "#c0392b", "log A"),
        (log_b, "#27ae60", "log B"),
    ) + (((math.log(gamma), "#8e44ad", "log gamma"),) if math.isfinite(gamma) else ()):
        y = sy(level)
        parts.append(
            f'<line x1="{pad}" y1="{y:.1f}" x2="{width - pad}" y2="{y:.1f}" '
            f'stroke="{color}" stroke-dasharray="6,4"/>'
        )
        parts.append(f'<text x="{width - pad + 4}" y="{y + 4:.1f}" '
                     f'font-size="11" fill="{color}">{label}</text>')
    if traj:
        pts = " ".join(f"{sx(n):.1f},{sy(lg):.1f}" for n, lg in traj)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#2c3e50" '
                     f'stroke-width="1.5"/>')
        for n, lg in traj:
            parts.append(f'<circle cx="{sx(n):.1f}" cy="{sy(lg):.1f}" r="2.5" '
                         f'fill="#2c3e50"/>')
    parts.append(f'<text x="{pad}" y="{height - 12}" font-size="12">n</text>')
    parts.append(f'<text x="8" y="{pad}" font-size="12">log L</text>')
    parts.append("</svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_design(args) -> int:
    spec = _build_spec(args)
    if args.exact:
        result = dp.design_exact_prop(spec)
    else:
        result = design(spec, n_reps=args.reps, seed=args.seed, threads=args.threads)
    doc = _design_doc(result)
    doc["seed"] = args.seed if not args.exact else None
    if not result.feasible:
        doc["infeasible"] = True
        _emit(doc, args.out)
        return EXIT_INFEASIBLE
    _emit(doc, args.out)
    return EXIT_OK


def _resolve_design(args, spec: TestSpec) -> DesignResult:
    if args.gamma is not None:
        return DesignResult.from_gamma(spec, args.gamma)
    if getattr(args, "exact", False):
        return dp.design_exact_prop(spec)
    return design(spec, n_reps=args.reps, seed=args.seed, threads=args.threads)


def _cmd_oc(args) -> int:
    spec = _build_spec(args)
    d = _resolve_design(args, spec)
    if not d.feasible:
        _emit({"infeasible": True, "gamma": d.gamma}, args.out)
        return EXIT_INFEASIBLE
    if args.exact:
        result = dp.oc_exact_prop(d, args.theta)
    else:
        result = oc(d, args.theta, n_reps=args.reps, seed=args.oc_seed,
                    threads=args.threads)
    _emit({
        "spec": _spec_doc(spec),
        "gamma": d.gamma,
        "theta": result.theta,
        "type2_est": result.type2_est,
        "power": result.power,
        "asn": result.asn,
        "n_reps": result.n_reps,
    }, args.out)
    return EXIT_OK


def _cmd_run(args) -> int:
    spec = _build_spec(args)
    d = _resolve_design(args, spec)
    if not d.feasible:
        _emit({"infeasible": True, "gamma": d.gamma}, args.out)
        return EXIT_INFEASIBLE
    if args.interactive:
        lines = sys.stdin
    elif args.obs:
        with open(args.obs) as fh:
            lines = fh.readlines()
    else:
        raise SpecError("run requires --obs FILE or --interactive")
    obs = parse_observations(lines, spec)
    trial = new_trial(d)
    decision = None
    for o in obs:
        decision = step(trial, o, d)
        if decision.terminal:
            break
    traj = _trajectory(trial)
    doc = {
        "spec": _spec_doc(spec),
        "boundaries": {"A": d.boundaries.A, "B": d.boundaries.B},
        "gamma": d.gamma,
        "umpbt_alt": _alt_doc(d.alternative),
        "decision": None if decision is None else decision.kind.value,
        "cause": None if decision is None or decision.cause is None
        else decision.cause.value,
        "n_used": 0 if decision is None else decision.at_n,
        "n_parsed": len(obs),
        "obs_checksum": _obs_checksum(obs),
        "trajectory": [[n, math.exp(lg)] for n, lg in traj],
        "trajectory_path": args.plot,
    }
    if args.plot:
        write_plot(args.plot, traj, d.boundaries, d.gamma)
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_umpbt(args) -> int:
    spec = _build_spec(args)
    if spec.side is Side.TWO_SIDED:
        alt = (derive_alternative(spec.one_sided(Side.RIGHT)),
               derive_alternative(spec.one_sided(Side.LEFT)))
    else:
        alt = derive_alternative(spec)
    _emit({"spec": _spec_doc(spec), "umpbt_alt": _alt_doc(alt)}, args.out)
    return EXIT_OK


def _cmd_effective_n(args) -> int:
    side = _SIDE_NAMES[args.side]
    n = effective_n(args.n_max, args.null, args.alpha, side)
    _emit({"effective_n": n, "n_max": args.n_max, "null_value": args.null,
           "alpha": args.alpha, "side": side.value}, args.out)
    return EXIT_OK


def _cmd_find_alt(args) -> int:
    spec = _build_spec(args)
    _emit({"spec": _spec_doc(spec), "fixed_design_alt": fixed_design_alt(spec)},
          args.out)
    return EXIT_OK


def _cmd_find_n(args) -> int:
    spec = _build_spec(args)
    n_star = find_n_star(spec, target_alpha=args.target_alpha)
    _emit({"spec": _spec_doc(spec), "target_alpha": args.target_alpha,
           "n_star": n_star}, args.out)
    return EXIT_OK


def _cmd_cost(args) -> int:
    spec_ref = _build_spec(args)
    n_star = find_n_star(spec_ref, target_alpha=args.target_alpha)
    if spec_ref.is_two_sample:
        spec_seq = TestSpec(
            family=spec_ref.family, side=spec_ref.side, alpha=args.target_alpha,
            beta=spec_ref.beta, n1_max=n_star, n2_max=n_star,
            sigma0=spec_ref.sigma0,
        )
    else:
        spec_seq = TestSpec(
            family=spec_ref.family, side=spec_ref.side,
            null_value=spec_ref.null_value, alpha=args.target_alpha,
            beta=spec_ref.beta, n_max=n_star, sigma0=spec_ref.sigma0,
        )
    d = design(spec_seq, n_reps=args.reps, seed=args.seed, threads=args.threads)
    if not d.feasible:
        _emit({"infeasible": True, "gamma": d.gamma}, args.out)
        return EXIT_INFEASIBLE
    multiple = cost_multiple(spec_ref, d, args.pi0, n_reps=args.reps,
                             seed=args.seed + 1, threads=args.threads)
    _emit({
        "spec": _spec_doc(spec_ref),
        "n_star": n_star,
        "gamma": d.gamma,
        "pi0": args.pi0,
        "cost_multiple": multiple,
    }, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqstop",
        description="Truncated sequential probability ratio tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        _spec_flags(p)
        p.add_argument("--out")
        if seeded:
            p.add_argument("--reps", type=int, default=1_000_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("design", help="calibrate the termination threshold")
    common(p)
    p.add_argument("--exact", action="store_true",
                   help="exact lattice calibration (proportions only)")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("oc", help="operating characteristics at an effect size")
    common(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--oc-seed", type=int, default=1)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=_cmd_oc)

    p = sub.add_parser("run", help="run a trial over recorded observations")
    common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--obs", help="observation file, one value per line")
    p.add_argument("--interactive", action="store_true",
                   help="read observations from stdin")
    p.add_argument("--plot", help="trajectory CSV or SVG path")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("umpbt", help="print the implied alternative")
    common(p, seeded=False)
    p.set_defaults(func=_cmd_umpbt)

    p = sub.add_parser("effective-n", help="effective sample size (proportions)")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--null", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.005)
    p.add_argument("--side", default="right", choices=("right", "left"))
    p.add_argument("--out")
    p.set_defaults(func=_cmd_effective_n)

    p = sub.add_parser("find-alt", help="fixed-design alternative effect size")
    common(p, seeded=False)
    p.set_defaults(func=_cmd_find_alt)

    p = sub.add_parser("find-n", help="sample size matching a stricter size")
    common(p, seeded=False)
    p.add_argument("--target-alpha", type=float, default=0.005)
    p.set_defaults(func=_cmd_find_n)

    p = sub.add_parser("cost", help="average sample cost as a fixed-design multiple")
    common(p)
    p.add_argument("--target-alpha", type=float, default=0.005)
    p.add_argument("--pi0", type=float, required=True)
    p.set_defaults(func=_cmd_cost)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ObservationFileError as exc:
        print(f"error: malformed observation file: {exc}", file=sys.stderr)
        return EXIT_BAD_OBS
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_OBS
    except InfeasibleDesignError as exc:
        print(f"error: infeasible design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SpecError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
