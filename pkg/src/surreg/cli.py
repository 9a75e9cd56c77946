"""Command line front end.

Exit codes are part of the contract: 0 means the command ran and every
checked mathematical property held; 1 means a usage, data, or solver
error; 2 means the command ran fine but a checked property failed (a
bound violation, a lemma violation, or an unconfirmed construction), so
scripts can distinguish "broken invocation" from "broken theorem".

Every command writes its primary output file plus a sibling
``<out>.manifest.json`` recording the command, a digest of the resolved
configuration, the seed and the files written, which is what makes runs
attributable after the fact.

Regime parameters (gamma, tau, loss parameters) never have silent
defaults: they select which guarantee applies, so they must be spelled
out on the command line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adversarial import (
    AdvSqObjective,
    LinearModel,
    PerturbNorm,
    SmoothAdvObjective,
    SolverConfig,
    evaluate,
    train,
)
from .bounds import BoundInapplicable, BoundVerifier, evaluate_learning_bound
from .conditional import AllBounded, ConstantBounded, Hypothesis
from .counterexamples import CounterexampleParams, TheoremTag, build_counterexample
from .datagen import (
    SynthConfig,
    TwoPoint,
    TwoPointWithOutliers,
    UniformSym,
    load_csv_dataset,
    make_synthetic,
    save_csv_dataset,
)
from .distributions import GeneratorConfig, load_distribution, random_symmetric_distribution
from .errors import DimensionMismatch, InvalidSpec, SurregError
from .lemmas import HuberF, LpClarkson, LpLowF, SqEpsF, check_lemma_grid
from .losses import LossFamily, parse_loss_tag
from .report import aggregate, load_eval_files, write_report

__all__ = ["main", "build_parser"]

#: fuzz configurations draw the label bound uniformly from this range
FUZZ_BOUND_RANGE = (0.5, 2.0)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved here for
    # genuine property violations, so downgrade usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="surreg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (each command has its own default)")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomized steps")
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=1,
        help="worker-count hint recorded in the manifest; computation is single-process",
    )

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser(
        "verify-bounds", parents=[common],
        help="check comparison bounds on sampled instances",
    )
    p.add_argument(
        "--config",
        required=True,
        help="distribution JSON path, or fuzz:SEED[,COUNT] for generated instances "
        "(fuzz draws each label bound from [0.5, 2])",
    )
    p.add_argument(
        "--class",
        dest="hclass",
        choices=["allbounded", "constant"],
        default="allbounded",
        help="hypothesis class to verify against",
    )
    p.add_argument(
        "--surrogates",
        required=True,
        help="comma-separated loss tags, e.g. huber:0.5,lp:1.5,lp:3,sqeps:0.25",
    )
    p.add_argument("--hypotheses", type=_positive_int, default=50)
    p.set_defaults(func=_cmd_verify_bounds, default_out="verify.json")

    p = sub.add_parser(
        "counterexample", parents=[common],
        help="build and confirm a breaking construction",
    )
    p.add_argument("--theorem", required=True, choices=[t.value for t in TheoremTag])
    p.add_argument("--B", dest="bound", type=float, required=True, help="label bound")
    p.add_argument("--y", type=float, required=True, help="lower label")
    p.add_argument("--mu", type=float, required=True, help="conditional mean")
    p.add_argument("--param", type=float, required=True, help="delta or eps")
    p.set_defaults(func=_cmd_counterexample, default_out="counterexample.json")

    p = sub.add_parser(
        "lemma-check", parents=[common],
        help="sweep a pairwise lower bound over a grid",
    )
    p.add_argument(
        "--lemma", required=True, choices=["huberF", "clarkson", "lplowF", "sqepsF"]
    )
    p.add_argument("--delta", type=float, help="huberF threshold")
    p.add_argument("--eps", type=float, help="sqepsF threshold")
    p.add_argument("--p", type=float, help="exponent for clarkson / lplowF")
    p.add_argument("--B", dest="radius", type=float, help="domain radius (default 1 for clarkson)")
    p.add_argument("--grid", type=_positive_int, default=401, help="points per axis")
    p.set_defaults(func=_cmd_lemma_check, default_out="lemma.json")

    p = sub.add_parser(
        "learning-bound", parents=[common],
        help="finite-sample guarantee for one distribution",
    )
    p.add_argument("--config", required=True, help="distribution JSON path or fuzz:SEED")
    p.add_argument(
        "--class", dest="hclass", choices=["allbounded", "constant"], default="constant"
    )
    p.add_argument("--surrogate", required=True, help="loss tag, e.g. huber:0.5")
    p.add_argument("--m", type=_positive_int, required=True, help="sample size")
    p.add_argument("--delta-conf", type=float, default=0.05, help="confidence level")
    p.add_argument("--trials", type=_positive_int, default=8)
    p.set_defaults(func=_cmd_learning_bound, default_out="learning_bound.json")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic regression CSV")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--B", dest="bound", type=float, required=True, help="label bound")
    p.add_argument(
        "--noise",
        required=True,
        help="twopoint:A | uniform:A | outliers:A,FRAC,SCALE",
    )
    p.set_defaults(func=_cmd_synth, default_out="synth.csv")

    p = sub.add_parser("adv-train", parents=[common], help="fit a linear model to a CSV dataset")
    p.add_argument("--data", required=True, help="CSV produced by synth (or same layout)")
    p.add_argument("--objective", choices=["smooth", "advsq"], default="smooth")
    p.add_argument("--loss", help="loss tag for the smooth objective, e.g. huber:0.2")
    p.add_argument("--gamma", type=float, required=True, help="perturbation budget")
    p.add_argument("--norm", choices=[n.value for n in PerturbNorm], required=True)
    p.add_argument("--tau", type=float, help="smoothness-term weight (smooth objective)")
    p.add_argument("--max-iters", type=_positive_int, default=2000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_adv_train, default_out="model.json")

    p = sub.add_parser(
        "adv-eval", parents=[common],
        help="clean and worst-case mse of a trained model",
    )
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, help="model JSON from adv-train")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--norm", choices=[n.value for n in PerturbNorm], required=True)
    p.set_defaults(func=_cmd_adv_eval, default_out="eval.json")

    p = sub.add_parser(
        "report", parents=[common],
        help="aggregate eval files into a table and figure",
    )
    p.add_argument("--inputs", nargs="+", required=True, help="eval JSON files")
    p.set_defaults(func=_cmd_report, default_out="report.md")

    return parser


# -- shared helpers ---------------------------------------------------------


def _out_path(args) -> Path:
    return Path(args.out) if args.out else Path(args.default_out)


def _manifest_config(args) -> dict:
    skip = {"func", "out", "default_out"}
    out = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        out[key] = value if isinstance(value, (int, float, str, bool, type(None))) else str(value)
    return out


def _finish(args, payload, outputs: list[str]) -> None:
    config = _manifest_config(args)
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    manifest = {
        "command": args.command,
        "config_digest": hashlib.sha256(blob).hexdigest(),
        "seed": args.seed,
        "tool_version": __version__,
        "outputs": outputs,
    }
    if payload is not None:
        _write_json(outputs[0], payload)
    _write_json(str(_out_path(args)) + ".manifest.json", manifest)


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_fuzz(config: str) -> tuple[int, int]:
    rest = config[len("fuzz:"):]
    parts = rest.split(",")
    if len(parts) not in (1, 2):
        raise InvalidSpec(f"bad fuzz config {config!r}, expected fuzz:SEED[,COUNT]")
    try:
        seed = int(parts[0])
        count = int(parts[1]) if len(parts) == 2 else 1
    except ValueError:
        raise InvalidSpec(f"bad fuzz config {config!r}") from None
    if count < 1:
        raise InvalidSpec("fuzz count must be >= 1")
    return seed, count


def _resolve_dists(config: str) -> list:
    if config.startswith("fuzz:"):
        seed, count = _parse_fuzz(config)
        rng = np.random.default_rng(seed)
        lo, hi = FUZZ_BOUND_RANGE
        dists = []
        for i in range(count):
            gen = GeneratorConfig(
                max_inputs=5, max_atoms=7, bound=float(rng.uniform(lo, hi))
            )
            dists.append(random_symmetric_distribution(seed + i, gen))
        return dists
    return [load_distribution(config)]


def _make_class(name: str, bound: float):
    return AllBounded(bound) if name == "allbounded" else ConstantBounded(bound)


def _sample_hypotheses(rng, dist, hclass, count: int) -> list[Hypothesis]:
    out = []
    B = dist.bound
    for _ in range(count):
        if isinstance(hclass, ConstantBounded):
            out.append(Hypothesis.constant(float(rng.uniform(-B, B)), dist.input_ids))
        else:
            out.append(
                Hypothesis({i: float(rng.uniform(-B, B)) for i in dist.input_ids})
            )
    return out


def _parse_noise(spec: str):
    name, _, rest = spec.partition(":")
    try:
        vals = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise InvalidSpec(f"bad noise spec {spec!r}") from None
    if name == "twopoint" and len(vals) == 1:
        return TwoPoint(vals[0])
    if name == "uniform" and len(vals) == 1:
        return UniformSym(vals[0])
    if name == "outliers" and len(vals) == 3:
        return TwoPointWithOutliers(vals[0], vals[1], vals[2])
    raise InvalidSpec(
        f"bad noise spec {spec!r}; expected twopoint:A, uniform:A or outliers:A,FRAC,SCALE"
    )


def _require(parser_hint: str, **flags):
    missing = [name for name, value in flags.items() if value is None]
    if missing:
        raise InvalidSpec(f"{parser_hint} requires --{', --'.join(missing)}")


def _build_lemma(args):
    if args.lemma == "huberF":
        _require("lemma huberF", delta=args.delta, B=args.radius)
        return HuberF(delta=args.delta, radius=args.radius)
    if args.lemma == "clarkson":
        _require("lemma clarkson", p=args.p)
        return LpClarkson(p=args.p, radius=args.radius if args.radius else 1.0)
    if args.lemma == "lplowF":
        _require("lemma lplowF", p=args.p, B=args.radius)
        return LpLowF(p=args.p, radius=args.radius)
    _require("lemma sqepsF", eps=args.eps)
    return SqEpsF(eps=args.eps)


# -- command handlers -------------------------------------------------------


def _cmd_verify_bounds(args) -> int:
    dists = _resolve_dists(args.config)
    surrogates = [parse_loss_tag(tag) for tag in args.surrogates.split(",")]
    rng = np.random.default_rng(args.seed)
    reports = []
    checked = skipped = held = 0
    min_slack = None
    for dist in dists:
        hclass = _make_class(args.hclass, dist.bound)
        verifier = BoundVerifier(dist, hclass)
        for h in _sample_hypotheses(rng, dist, hclass, args.hypotheses):
            for kind in surrogates:
                try:
                    rep = verifier.verify(h, kind)
                except BoundInapplicable:
                    skipped += 1
                    continue
                checked += 1
                held += int(rep.holds)
                if min_slack is None or rep.slack < min_slack:
                    min_slack = rep.slack
                reports.append(rep.to_dict())
    payload = {
        "reports": reports,
        "summary": {
            "distributions": len(dists),
            "checked": checked,
            "held": held,
            "skipped": skipped,
            "min_slack": min_slack,
        },
    }
    out = _out_path(args)
    _finish(args, payload, [str(out)])
    violations = checked - held
    print(
        f"checked {checked} bound instances across {len(dists)} distributions: "
        f"{violations} violations, {skipped} inapplicable -> {out}"
    )
    return 2 if violations else 0


def _cmd_counterexample(args) -> int:
    params = CounterexampleParams(bound=args.bound, y=args.y, mu=args.mu, param=args.param)
    ce = build_counterexample(args.theorem, params)
    payload = {
        "theorem": ce.theorem.value,
        "B": params.bound,
        "y": params.y,
        "mu": params.mu,
        "param": params.param,
        "surrogate": ce.surrogate.tag(),
        "center": ce.center,
        "witness": ce.witness,
        "surrogate_error_center": ce.surrogate_error_center,
        "surrogate_error_witness": ce.surrogate_error_witness,
        "squared_regret": ce.squared_regret,
        "regime_margin": ce.regime_margin,
        "confirmed": ce.confirmed,
    }
    out = _out_path(args)
    _finish(args, payload, [str(out)])
    state = "confirmed" if ce.confirmed else "NOT confirmed"
    print(
        f"{ce.theorem.value} construction {state}: squared regret "
        f"{ce.squared_regret:.6g} at surrogate-optimal witness -> {out}"
    )
    return 0 if ce.confirmed else 2


def _cmd_lemma_check(args) -> int:
    lemma = _build_lemma(args)
    report = check_lemma_grid(lemma, n=args.grid)
    payload = {
        "lemma": args.lemma,
        "params": {
            k: v
            for k, v in (("delta", args.delta), ("eps", args.eps), ("p", args.p),
                         ("B", args.radius))
            if v is not None
        },
        "points": report.points,
        "min_deviation": report.min_deviation,
        "argmin": list(report.argmin),
        "violations": report.violations,
    }
    out = _out_path(args)
    _finish(args, payload, [str(out)])
    print(
        f"swept {report.points} grid points: min deviation {report.min_deviation:.3g} "
        f"at {report.argmin}, {report.violations} violations -> {out}"
    )
    return 2 if report.violations else 0


def _cmd_learning_bound(args) -> int:
    dist = _resolve_dists(args.config)[0]
    hclass = _make_class(args.hclass, dist.bound)
    kind = parse_loss_tag(args.surrogate)
    result = evaluate_learning_bound(
        kind, dist, hclass, m=args.m, delta_conf=args.delta_conf,
        seed=args.seed, trials=args.trials,
    )
    payload = {
        "surrogate": kind.tag(),
        "m": args.m,
        "delta_conf": args.delta_conf,
        "rhs_value": result.rhs_value,
        "rademacher_estimate": result.rademacher_estimate,
        "deviation_term": result.deviation_term,
        "surrogate_gap": result.surrogate_gap,
        "target_gap": result.target_gap,
    }
    out = _out_path(args)
    _finish(args, payload, [str(out)])
    print(
        f"m={args.m}: rhs {result.rhs_value:.6g} "
        f"(complexity estimate {result.rademacher_estimate:.6g}) -> {out}"
    )
    return 0


def _cmd_synth(args) -> int:
    noise = _parse_noise(args.noise)
    config = SynthConfig(seed=args.seed, d=args.d, m=args.m, bound=args.bound, noise=noise)
    result = make_synthetic(config)
    out = _out_path(args)
    save_csv_dataset(out, result.data)
    _finish(args, None, [str(out)])
    print(f"wrote {len(result.data)} rows x {result.data.n_features} features -> {out}")
    return 0


def _cmd_adv_train(args) -> int:
    data = load_csv_dataset(args.data)
    norm = PerturbNorm(args.norm)
    if args.objective == "smooth":
        _require("adv-train --objective smooth", loss=args.loss, tau=args.tau)
        kind = parse_loss_tag(args.loss)
        if kind.family is LossFamily.EPS:
            print(
                "warning: the eps-insensitive surrogate carries no worst-case "
                "squared-error guarantee; see the breaking constructions",
                file=sys.stderr,
            )
        objective = SmoothAdvObjective(kind, args.gamma, norm, args.tau)
        method = f"smooth:{kind.tag()}"
    else:
        objective = AdvSqObjective(args.gamma, norm)
        method = "advsq"
    solver = SolverConfig(max_iters=args.max_iters, tol=args.tol, seed=args.seed)
    result = train(objective, data, solver)
    payload = {
        "w": [float(v) for v in result.model.weights],
        "b": result.model.bias,
        "objective": result.objective_value,
        "iters": result.iterations,
        "method": method,
        "gamma": args.gamma,
        "norm": norm.value,
        "tau": args.tau if args.objective == "smooth" else None,
    }
    out = _out_path(args)
    _finish(args, payload, [str(out)])
    print(
        f"trained {method} on {len(data)} rows: objective {result.objective_value:.6g} "
        f"in {result.iterations} iterations -> {out}"
    )
    return 0


def _cmd_adv_eval(args) -> int:
    data = load_csv_dataset(args.data)
    with open(args.model) as fh:
        stored = json.load(fh)
    try:
        model = LinearModel(weights=np.asarray(stored["w"], dtype=float), bias=stored["b"])
    except KeyError as exc:
        raise InvalidSpec(f"{args.model}: missing key {exc}") from None
    if model.weights.shape[0] != data.n_features:
        raise DimensionMismatch(
            f"model has {model.weights.shape[0]} weights, data has "
            f"{data.n_features} features"
        )
    norm = PerturbNorm(args.norm)
    result = evaluate(model, data, args.gamma, norm)
    payload = {
        "clean_mse": result.clean_mse,
        "robust_mse": result.robust_mse,
        "gamma": args.gamma,
        "norm": norm.value,
        "method": stored.get("method", "unknown"),
    }
    out = _out_path(args)
    _finish(args, payload, [str(out)])
    print(
        f"clean mse {result.clean_mse:.6g}, worst-case mse {result.robust_mse:.6g} "
        f"at gamma={args.gamma:g} -> {out}"
    )
    return 0


def _cmd_report(args) -> int:
    records = load_eval_files(args.inputs)
    rows = aggregate(records)
    out = _out_path(args)
    outputs = write_report(rows, out)
    _finish(args, None, outputs)
    print(f"aggregated {len(records)} runs into {len(rows)} groups -> {', '.join(outputs)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SurregError as exc:
        print(f"surreg: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"surreg: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
