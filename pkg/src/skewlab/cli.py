"""Command line front end.

Systems are described by small JSON files; every command reads them,
runs one of the library constructions, and writes a JSON report with
exact fractions (as "p/q" strings) next to rounded float views.  All
runs are deterministic; the --seed flag is recorded in the output for
bookkeeping but no randomness is consumed anywhere.

Exit codes: 0 on success, 2 when a construction refuses with a
structured reason, 1 on malformed input or misuse.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any, Sequence

from .distributions import kantorovich
from .driver import (
    IterationSchedule,
    bootstrap_regular,
    run_factor,
    run_isomorphism,
    seed_from_orbit,
)
from .errors import (
    OutOfDomain,
    ParseError,
    SkewlabError,
    SpaceMismatch,
    ValidationError,
)
from .groups import FiniteGroup, cyclic, from_tables, trivial
from .improvement import improve
from .systems import (
    ExtensionSystem,
    check_extension_ergodic,
    name_distribution,
)


# ---------------------------------------------------------------------------
# system (de)serialization


def _fraction_in(value: Any) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, str)):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise ParseError("cannot read %r as an exact fraction" % (value,))


def parse_group_spec(data: Any) -> FiniteGroup:
    if not isinstance(data, dict) or "type" not in data:
        raise ParseError("group must be an object with a type field")
    kind = data["type"]
    if kind == "trivial":
        return trivial()
    if kind == "cyclic":
        order = data.get("order")
        if not isinstance(order, int) or order < 1:
            raise ParseError("cyclic group needs a positive integer order")
        return cyclic(order)
    if kind == "tables":
        mul = data.get("mul")
        if not isinstance(mul, list) or not mul:
            raise ParseError("table group needs a mul matrix")
        metric = None
        if data.get("metric") is not None:
            metric = [[_fraction_in(v) for v in row] for row in data["metric"]]
        try:
            return from_tables(mul, metric, name=data.get("name", "group"))
        except (ValidationError, TypeError, IndexError) as exc:
            raise ParseError("bad group tables: %s" % exc) from exc
    raise ParseError("unknown group type %r" % (kind,))


def parse_system_spec(data: Any) -> ExtensionSystem:
    """Build an extension from its JSON description.

    Required fields: size, labels, group, skew; labels and skew are
    lists of length size, skew entries index the group.
    """
    if not isinstance(data, dict):
        raise ParseError("system description must be an object")
    for key in ("size", "labels", "group", "skew"):
        if key not in data:
            raise ParseError("system description misses %r" % key)
    size = data["size"]
    if not isinstance(size, int) or size < 1:
        raise ParseError("size must be a positive integer")
    labels = data["labels"]
    skew = data["skew"]
    for name, seq in (("labels", labels), ("skew", skew)):
        if not isinstance(seq, list) or len(seq) != size:
            raise ParseError("%s must be a list of length %d" % (name, size))
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in seq):
            raise ParseError("%s entries must be integers" % name)
    group = parse_group_spec(data["group"])
    try:
        return ExtensionSystem(size, tuple(labels), group, tuple(skew))
    except ValidationError as exc:
        raise ParseError("inconsistent system: %s" % exc) from exc


def group_to_dict(group: FiniteGroup) -> dict:
    return {
        "type": "tables",
        "mul": [list(row) for row in group.mul],
        "metric": [[_fraction_str(v) for v in row] for row in group.metric],
        "name": group.name,
    }


def system_to_dict(ext: ExtensionSystem) -> dict:
    return {
        "size": ext.size,
        "labels": list(ext.labels),
        "group": group_to_dict(ext.group),
        "skew": list(ext.skew),
    }


def load_system(path: str) -> ExtensionSystem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError("%s is not JSON: %s" % (path, exc)) from exc
    return parse_system_spec(data)


# ---------------------------------------------------------------------------
# report encoding


def _fraction_str(f: Fraction) -> str:
    return "%d/%d" % (f.numerator, f.denominator)


def _encode(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return {"exact": _fraction_str(obj), "value": float("%.12g" % float(obj))}
    if is_dataclass(obj) and not isinstance(obj, type):
        return _encode(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _emit(payload: Any, out: str | None) -> None:
    text = json.dumps(_encode(payload), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def _witness_dict(ext: ExtensionSystem) -> dict:
    w = check_extension_ergodic(ext)
    return {
        "ergodic": w.ergodic,
        "cycle_length": w.cycle_length,
        "splitting_point": list(w.splitting_point) if w.splitting_point else None,
    }


def _cmd_metrics(args: argparse.Namespace) -> dict:
    target = load_system(args.target)
    source = load_system(args.source)
    dist = kantorovich(
        name_distribution(target, args.n), name_distribution(source, args.n)
    )
    return {
        "command": "metrics",
        "n": args.n,
        "seed": args.seed,
        "target": _witness_dict(target),
        "source": _witness_dict(source),
        "name_distance": dist,
    }


def _rect_for(args: argparse.Namespace, source: ExtensionSystem):
    if args.rect_base:
        base = tuple(int(v) for v in args.rect_base.split(","))
    else:
        base = tuple(range(source.size))
    if args.rect_group:
        grp = tuple(int(v) for v in args.rect_group.split(","))
    else:
        grp = tuple(range(source.group.order))
    return base, grp


def _cmd_improve(args: argparse.Namespace) -> dict:
    target = load_system(args.target)
    source = load_system(args.source)
    pbar = source.labels
    current, cert = bootstrap_regular(source, pbar, args.n, args.delta, args.epsilon)
    a1, a2 = _rect_for(args, source)
    res = improve(
        target, current, pbar, args.n, args.delta, args.n1, args.delta1,
        a1, a2, args.epsilon, strict=args.strict_schedule,
    )
    return {
        "command": "improve",
        "seed": args.seed,
        "bootstrap": {"height": cert.height, "domain_mass": cert.domain_mass},
        "report": res.report,
        "labels": list(res.labels),
        "exponent": list(res.speedup.exponent),
        "alpha": list(res.alpha.values),
        "chain_start": res.chain[0],
        "conclusions": res.report.conclusions(),
    }


def _schedule_from(args: argparse.Namespace, source: ExtensionSystem) -> IterationSchedule:
    epsilon = args.epsilon
    if args.epsilons:
        eps = tuple(Fraction(v) for v in args.epsilons.split(","))
    else:
        eps = tuple(epsilon / Fraction(4 * 2 ** k) for k in range(max(args.budget, 1)))
    steps = ((args.n, args.delta, args.n1, args.delta1),)
    rect = (_rect_for(args, source),)
    return IterationSchedule(
        epsilon=epsilon,
        epsilons=eps,
        steps=steps,
        rectangles=rect,
        budget=args.budget,
        strict=args.strict_schedule,
    )


def _factor_payload(result) -> dict:
    log = result.log
    out = {
        "labels": list(result.labels),
        "exponent": list(result.speedup.exponent),
        "beta": list(result.beta.values),
        "chain_start": result.chain[0] if result.chain else None,
        "model_start": result.model_start,
        "change_mass": log.change_mass,
        "change_bound": log.change_bound,
        "witness": {
            "ergodic": log.witness.ergodic,
            "cycle_length": log.witness.cycle_length,
            "splitting_point": list(log.witness.splitting_point)
            if log.witness.splitting_point
            else None,
        },
        "reports": list(log.reports),
    }
    if log.generator:
        out["generator"] = list(log.generator)
        out["separation_failure"] = log.separation_failure
    return out


def _cmd_factor(args: argparse.Namespace) -> dict:
    target = load_system(args.target)
    source = load_system(args.source)
    schedule = _schedule_from(args, source)
    result = run_factor(target, source, source.labels, schedule)
    payload = _factor_payload(result)
    payload["command"] = "factor"
    payload["seed"] = args.seed
    return payload


def _cmd_iso(args: argparse.Namespace) -> dict:
    target = load_system(args.target)
    source = load_system(args.source)
    schedule = _schedule_from(args, source)
    result = run_isomorphism(
        target, source, source.labels, schedule, copy_zeta=args.copy_zeta
    )
    payload = _factor_payload(result)
    payload["command"] = "iso"
    payload["seed"] = args.seed
    return payload


def _cmd_seed_orbit(args: argparse.Namespace) -> dict:
    target = load_system(args.target)
    source = load_system(args.source)
    labels, alpha = seed_from_orbit(target, source, args.nlen, args.zeta, n=args.n)
    return {
        "command": "seed-orbit",
        "seed": args.seed,
        "labels": list(labels),
        "alpha": list(alpha.values),
    }


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError("%r is not a fraction" % text) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewlab",
        description="speedup constructions for finite skew products",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--target", required=True, help="target system JSON file")
        p.add_argument("--source", required=True, help="source system JSON file")
        p.add_argument("--seed", type=int, default=None, help="recorded, never used")
        p.add_argument("--out", default=None, help="write the JSON report here")

    def tolerances(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--delta", type=_fraction_arg, required=True)
        p.add_argument("--n1", type=int, required=True)
        p.add_argument("--delta1", type=_fraction_arg, required=True)
        p.add_argument("--epsilon", type=_fraction_arg, required=True)
        p.add_argument("--rect-base", default=None, help="comma list of base points")
        p.add_argument("--rect-group", default=None, help="comma list of group elements")
        p.add_argument("--strict-schedule", action="store_true")

    p = sub.add_parser("metrics", help="ergodicity witnesses and the n-name distance")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("improve", help="bootstrap and run one improvement step")
    common(p)
    tolerances(p)
    p.set_defaults(func=_cmd_improve)

    p = sub.add_parser("factor", help="build a speedup factoring onto the target")
    common(p)
    tolerances(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--epsilons", default=None, help="comma list of iteration tolerances")
    p.set_defaults(func=_cmd_factor)

    p = sub.add_parser("iso", help="factor loop with generator tracking")
    common(p)
    tolerances(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--epsilons", default=None, help="comma list of iteration tolerances")
    p.add_argument("--copy-zeta", type=_fraction_arg, default=Fraction(1, 10))
    p.set_defaults(func=_cmd_iso)

    p = sub.add_parser("seed-orbit", help="copy one good target orbit onto the source")
    common(p)
    p.add_argument("--nlen", type=int, required=True)
    p.add_argument("--zeta", type=_fraction_arg, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_seed_orbit)

    return parser


def run_command(argv: Sequence[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv))
    out = getattr(args, "out", None)
    try:
        payload = args.func(args)
    except (ParseError, ValidationError, SpaceMismatch, OutOfDomain) as exc:
        _emit({"error": type(exc).__name__, "detail": str(exc)}, out)
        return 1
    except SkewlabError as exc:
        _emit({"error": type(exc).__name__, "detail": str(exc)}, out)
        return 2
    _emit(payload, out)
    return 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
