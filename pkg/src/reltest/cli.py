"""Command-line front end: ``reltest {junta,subclass,certify,approx}``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .fileformat import load_function
from .harness import ExperimentConfig, certify, run_experiment
from .subclass_catalog import SubclassSpec, build_approx


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _experiment_args(p: argparse.ArgumentParser, tester: str) -> None:
    p.add_argument("--config", help="JSON file with experiment settings; flags given explicitly override it")
    if tester == "subclass":
        p.add_argument("--class", dest="cls", help="dt, juntas, conj or parity")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=_fraction)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--case", choices=("yes", "no"))
    p.add_argument("--function", help="instance file; every trial tests this function")
    p.add_argument("--out", help="JSONL output path")
    p.add_argument("--threshold", type=float, help="required Wilson lower bound on the correct-verdict rate")
    if tester == "junta":
        p.add_argument("--c-T", dest="c_T", type=float)
        p.add_argument("--c-M", dest="c_M", type=float)
        p.add_argument("--c-h", dest="c_h", type=float)
    else:
        p.add_argument("--c1", type=float)
        p.add_argument("--c-fv", dest="c_fv", type=float)
    p.add_argument("--strict", action="store_true", default=None,
                   help="refuse constants that violate the analysis inequalities")
    p.add_argument("--timing", action="store_true", default=None,
                   help="record wall time per trial (breaks byte-identical reruns)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reltest", description="Relative-error junta and subclass testers.")
    sub = parser.add_subparsers(dest="command", required=True)

    _experiment_args(sub.add_parser("junta", help="run the k-junta tester"), "junta")
    _experiment_args(sub.add_parser("subclass", help="run the subclass tester"), "subclass")

    c = sub.add_parser("certify", help="print the exact rel-dist of a function to a class")
    c.add_argument("--function", required=True)
    c.add_argument("--class", dest="cls", default="juntas")
    c.add_argument("--k", type=int, required=True)

    a = sub.add_parser("approx", help="build Approx(h, kappa) for a class")
    a.add_argument("--class", dest="cls", required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--h", type=int, required=True)
    a.add_argument("--kappa", type=_fraction, required=True)
    a.add_argument("--dump", help="write members (hex table and satisfier count per line)")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    settings: dict = {}
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        settings[key] = val
    if "class" in settings:
        settings["cls"] = settings.pop("class")
    settings["tester"] = args.command
    return ExperimentConfig.from_dict(settings)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("junta", "subclass"):
            cfg = _config(args)
            summary, _ = run_experiment(cfg)
            print(json.dumps(summary, sort_keys=True))
            return 0 if summary["pass"] else 1
        if args.command == "certify":
            f = load_function(args.function)
            cert, witness = certify(f, SubclassSpec(args.cls, args.k))
            print(json.dumps({
                "rel_dist": str(cert.value),
                "sym_diff": cert.sym_diff,
                "f_ones": cert.f_ones,
                "witness": repr(witness),
            }))
            return 0
        if args.command == "approx":
            approx = build_approx(SubclassSpec(args.cls, args.k), args.h, args.kappa)
            text = approx.dump()
            if args.dump:
                with open(args.dump, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
    except (ValueError, OSError) as exc:
        print(f"reltest: error: {exc}", file=sys.stderr)
        return 2
    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
