"""Command line entry point: ``fbnl {simulate,sweep,chsh,oracle}``.

Reports go to stdout (or ``--output``) as JSON or CSV. Output is a pure
function of the flags; ``--workers`` only changes how fast it arrives.

CSV layouts (header row first):

* simulate: ``section,key,value``
* sweep: ``delta_radians,e_ab_mc,stderr,e_ab_analytic,e_ab_oracle``
* chsh: ``model,quantity,theta_a,theta_b,value,stderr``
* oracle: ``check,max_abs_error,tolerance,passed``
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

from . import experiment
from .coding import CODECS
from .experiment import ExperimentConfig
from .rejection import DEFAULT_MAX_ITERATIONS, IterationCapExceeded

_PI_EXPR = re.compile(
    r"^(?P<sign>[+-])?\s*(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*\*?\s*pi"
    r"(?:\s*/\s*(?P<den>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?))?$"
)


def parse_radians(text: str) -> float:
    """Parse a radian value: a float or a multiple of pi such as ``pi/3``, ``-2*pi/3``.

    Anything that looks like degrees is refused.
    """
    t = text.strip().lower()
    if t.endswith(("deg", "°", "degrees")):
        raise argparse.ArgumentTypeError(f"angles are radians only, got {text!r}")
    try:
        value = float(t)
    except ValueError:
        m = _PI_EXPR.match(t)
        if not m:
            raise argparse.ArgumentTypeError(f"not a radian value: {text!r}") from None
        value = float(m["num"] or 1.0) * math.pi / float(m["den"] or 1.0)
        if m["sign"] == "-":
            value = -value
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=42, help="master seed (default 42)")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--trials", type=_positive_int, default=100_000,
                     help="trials per setting pair (default 100000)")
    sim.add_argument("--theta-a", type=parse_radians, default=0.0, help="Alice's angle in radians")
    sim.add_argument("--theta-b", type=parse_radians, default=math.pi / 3,
                     help="Bob's angle in radians (default pi/3)")
    sim.add_argument("--codec", choices=CODECS, default="unary")
    sim.add_argument("--max-iterations", type=_positive_int, default=DEFAULT_MAX_ITERATIONS,
                     help="rejection iteration cap")
    sim.add_argument("--workers", type=_positive_int, default=1,
                     help="worker processes; output does not depend on this")

    parser = argparse.ArgumentParser(
        prog="fbnl",
        description="Simulate the singlet cosine correlation with one finite-length classical message.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common, sim], help="run protocol trials at one setting pair")
    sweep = sub.add_parser("sweep", parents=[common, sim], help="correlation over an even grid of angle differences")
    sweep.add_argument("--sweep-points", type=_positive_int, default=16)
    sub.add_parser("chsh", parents=[common, sim], help="CHSH value of the protocol and the no-message baseline")
    oracle = sub.add_parser("oracle", parents=[common], help="quadrature check of the correlation integral")
    oracle.add_argument("--grid-points", type=_positive_int, default=64)
    oracle.add_argument("--theta-b", type=parse_radians, default=0.0)
    return parser


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _flatten(prefix: str, obj, out: list) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    else:
        out.append((prefix, obj))


def render_csv(report: dict) -> str:
    cmd = report["command"]
    if cmd == "simulate":
        rows = []
        for section in ("config", "correlation", "communication", "checks"):
            flat: list = []
            _flatten("", report[section], flat)
            rows.extend((section, k, repr(v) if isinstance(v, float) else v) for k, v in flat)
        return _csv(["section", "key", "value"], rows)
    if cmd == "sweep":
        cols = ["delta_radians", "e_ab_mc", "stderr", "e_ab_analytic", "e_ab_oracle"]
        return _csv(cols, ([repr(float(r[c])) for c in cols] for r in report["rows"]))
    if cmd == "chsh":
        rows = []
        for model in ("protocol", "lhv"):
            side = report[model]
            for c in side["correlators"]:
                rows.append((model, "E", repr(c["theta_a"]), repr(c["theta_b"]),
                             repr(c["e_ab"]), repr(c["stderr"])))
            rows.append((model, "S", "", "", repr(side["s"]), repr(side["stderr_s"])))
        ns = report["no_signaling"]
        rows.append(("protocol", "no_signaling_p_value", "", "", repr(ns["p_value"]), ""))
        return _csv(["model", "quantity", "theta_a", "theta_b", "value", "stderr"], rows)
    if cmd == "oracle":
        tol = report["checks"]["tolerance"]
        rows = [
            (name, repr(report[name]["max_abs_error"]), repr(tol), report[name]["max_abs_error"] <= tol)
            for name in ("correlation", "marginals", "density_mass")
        ]
        return _csv(["check", "max_abs_error", "tolerance", "passed"], rows)
    raise ValueError(f"no CSV layout for {cmd!r}")


def render(report: dict, output_format: str) -> str:
    if output_format == "json":
        return json.dumps(report, indent=2, allow_nan=False) + "\n"
    return render_csv(report)


def run(args: argparse.Namespace) -> tuple[dict, int]:
    if args.command == "oracle":
        report = experiment.oracle_report(args.grid_points, args.theta_b)
        return report, 0 if report["checks"]["all_passed"] else 1
    cfg = ExperimentConfig(
        seed=args.seed,
        trials=args.trials,
        theta_a=args.theta_a,
        theta_b=args.theta_b,
        codec=args.codec,
        output_format=args.output_format,
        sweep_points=getattr(args, "sweep_points", 16),
        max_iterations=args.max_iterations,
        workers=args.workers,
    )
    builders = {
        "simulate": experiment.simulate_report,
        "sweep": experiment.sweep_report,
        "chsh": experiment.chsh_report,
    }
    return builders[args.command](cfg), 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sweep_points", 2) < 2:
        parser.error("--sweep-points must be at least 2")
    try:
        report, status = run(args)
    except IterationCapExceeded as exc:
        print(f"fbnl: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        parser.error(str(exc))
    text = render(report, args.output_format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
