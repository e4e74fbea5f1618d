"""Command-line front end.

Every subcommand produces a list of flat records which are rendered as text,
CSV or JSON.  Floats are written with 10 significant digits; in JSON they are
strings so output is byte-stable across platforms.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable, Dict, List, Optional, Sequence

from . import tones
from .errors import DomainError, EvaluationError, PoleError, SolverError
from .geometry import SpaceForm, TwoBallConfig, tilde_of_radius
from .oracle import RadialGrid, fd_membrane_tone, fd_plate_tone

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_SOLVER = 3

TABLE1_ROWS = [(n, L) for n in (2, 3) for L in (0.7, 0.1, 0.05, 0.003)]
TABLE2_RADII = (50.0, 100.0, 5000.0, 100000.0)

# field name -> type, per subcommand; used to parse JSON output back
RESULT_SCHEMAS: Dict[str, Dict[str, type]] = {
    "tone": {"n": int, "kappa": float, "radius": float, "lambda": float, "gamma": float,
             "gamma_fourth_root": float, "bracket_lo": float, "bracket_hi": float,
             "residual": float, "iterations": int, "method": str},
    "twoball": {"n": int, "kappa": float, "alpha": float, "beta": float, "total": float,
                "lambda": float, "gamma": float, "bracket_lo": float, "bracket_hi": float,
                "residual": float, "iterations": int, "method": str},
    "threshold": {"n": int, "kappa": float, "radius": float, "volume_cap": float},
    "table1": {"n": int, "radius": float, "algebraic": float, "asymptotic": float, "abs_diff": float},
    "table2": {"radius": float, "algebraic": float, "delta": float, "approximate": float,
               "approximate_delta": float},
    "scan": {"radius": float, "lambda": float, "gamma": float, "g1": float, "holds": bool},
    "oracle": {"n": int, "kappa": float, "radius": float, "grid": int, "fd_gamma": float,
               "gamma": float, "rel_diff": float, "fd_membrane": float, "g1_squared": float},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# ----------------------------------------------------------------------------
# validation


def _space_form(args) -> SpaceForm:
    if args.dim < 2:
        raise DomainError("--dim must be at least 2")
    if not (math.isfinite(args.kappa) and args.kappa >= 0):
        raise DomainError("--kappa must be finite and non-negative")
    return SpaceForm(args.dim, args.kappa)


def _positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"--{name} must be positive")
    return value


def _curved_low_dim(sf: SpaceForm, what: str) -> None:
    if sf.kappa == 0 or sf.n not in (2, 3):
        raise DomainError(f"{what} needs kappa > 0 and dim 2 or 3")


# ----------------------------------------------------------------------------
# commands


def _tone_record(sf: SpaceForm, L: float, res: tones.ToneResult) -> dict:
    return {"n": sf.n, "kappa": sf.kappa, "radius": L, "lambda": res.lam, "gamma": res.gamma,
            "gamma_fourth_root": res.gamma_fourth_root, "bracket_lo": res.bracket_lo,
            "bracket_hi": res.bracket_hi, "residual": res.residual,
            "iterations": res.iterations, "method": res.method.value}


def cmd_tone(args) -> List[dict]:
    sf = _space_form(args)
    L = _positive("radius", args.radius)
    if sf.kappa > 0 and sf.n not in (2, 3):
        raise DomainError("curved tones need dim 2 or 3")
    return [_tone_record(sf, L, tones.fundamental_tone(sf, L))]


def cmd_twoball(args) -> List[dict]:
    sf = _space_form(args)
    _curved_low_dim(sf, "twoball")
    if (args.total is None) == (args.radius is None):
        raise DomainError("give exactly one of --total or --radius")
    total = args.total if args.total is not None else tilde_of_radius(sf.kappa, _positive("radius", args.radius))
    _positive("total", total)
    if not (math.isfinite(args.alpha) and 0 <= args.alpha <= total):
        raise DomainError("--alpha must lie in [0, total]")
    cfg = TwoBallConfig.from_alpha(sf, args.alpha, total)
    res = tones.two_ball_tone(sf, cfg)
    return [{"n": sf.n, "kappa": sf.kappa, "alpha": cfg.alpha, "beta": cfg.beta, "total": total,
             "lambda": res.lam, "gamma": res.gamma, "bracket_lo": res.bracket_lo,
             "bracket_hi": res.bracket_hi, "residual": res.residual,
             "iterations": res.iterations, "method": res.method.value}]


def cmd_threshold(args) -> List[dict]:
    sf = _space_form(args)
    _curved_low_dim(sf, "threshold")
    th = tones.threshold_radius(sf, step=_positive("step", args.step))
    return [{"n": sf.n, "kappa": sf.kappa, "radius": th.radius, "volume_cap": th.volume_cap}]


def cmd_table1(args) -> List[dict]:
    rows = []
    for n, L in TABLE1_ROWS:
        sf = SpaceForm(n, 1.0)
        alg = tones.fundamental_tone(sf, L).lam
        asym = tones.tone_asymptotic_small(sf, L) ** 0.25
        rows.append({"n": n, "radius": L, "algebraic": alg, "asymptotic": asym,
                     "abs_diff": abs(alg - asym)})
    return rows


def cmd_table2(args) -> List[dict]:
    sf = SpaceForm(3, 1.0)
    rows = []
    for L in TABLE2_RADII:
        lam = tones.fundamental_tone(sf, L).lam
        approx = tones.tone_asymptotic_large_3d(1.0, L) ** 0.25
        # sqrt(1 + (pi/L)^2) - 1 without cancellation
        approx_delta = math.expm1(0.5 * math.log1p((math.pi / L) ** 2))
        rows.append({"radius": L, "algebraic": lam, "delta": lam - 1.0, "approximate": approx,
                     "approximate_delta": approx_delta})
    return rows


def cmd_scan(args) -> List[dict]:
    sf = _space_form(args)
    _curved_low_dim(sf, "scan")
    start, stop = _positive("start", args.start), _positive("stop", args.stop)
    if stop < start or args.steps < 1:
        raise DomainError("need start <= stop and steps >= 1")
    rows = []
    for i in range(args.steps):
        L = start if args.steps == 1 else start + (stop - start) * i / (args.steps - 1)
        gap = tones.sharpness_gap(sf, L)
        rows.append({"radius": L, "lambda": gap.lam, "gamma": gap.lam ** 4, "g1": gap.g1,
                     "holds": bool(gap.holds)})
    return rows


def cmd_oracle(args) -> List[dict]:
    sf = _space_form(args)
    L = _positive("radius", args.radius)
    if sf.n not in (2, 3):
        raise DomainError("oracle supports dim 2 or 3")
    if args.grid < 16:
        raise DomainError("--grid must be at least 16")
    grid = RadialGrid.uniform(sf, L, args.grid)
    fd = fd_plate_tone(sf, L, grid)
    exact = tones.fundamental_tone(sf, L).gamma
    memb = fd_membrane_tone(sf, L, grid)
    g1 = tones.pole_at_radius(sf, 1, L)
    return [{"n": sf.n, "kappa": sf.kappa, "radius": L, "grid": args.grid, "fd_gamma": fd,
             "gamma": exact, "rel_diff": abs(fd - exact) / exact, "fd_membrane": memb,
             "g1_squared": g1 * g1}]


COMMANDS: Dict[str, Callable] = {
    "tone": cmd_tone, "twoball": cmd_twoball, "threshold": cmd_threshold,
    "table1": cmd_table1, "table2": cmd_table2, "scan": cmd_scan, "oracle": cmd_oracle,
}


# ----------------------------------------------------------------------------
# rendering


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def render(records: List[dict], fmt: str) -> str:
    if fmt == "json":
        payload = [{k: (v if isinstance(v, bool) else format_value(v)) for k, v in r.items()}
                   for r in records]
        return json.dumps(payload, indent=2) + "\n"
    cells = [[format_value(v) for v in r.values()] for r in records]
    header = list(records[0].keys()) if records else []
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [max(len(h), *(len(row[i]) for row in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def parse_records(text: str, subcommand: str) -> List[dict]:
    """Inverse of the JSON rendering: restore typed values using the result schema."""
    schema = RESULT_SCHEMAS[subcommand]
    out = []
    for raw in json.loads(text):
        if set(raw) != set(schema):
            raise ValueError(f"fields {sorted(raw)} do not match schema for {subcommand}")
        rec = {}
        for key, typ in schema.items():
            val = raw[key]
            if typ is bool:
                if not isinstance(val, bool):
                    raise ValueError(f"{key} should be a boolean")
                rec[key] = val
            else:
                rec[key] = typ(val)
        out.append(rec)
    return out


# ----------------------------------------------------------------------------
# entry points


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")

    geom = _Parser(add_help=False)
    geom.add_argument("--dim", type=int, required=True, help="dimension n")
    geom.add_argument("--kappa", type=float, default=1.0, help="curvature scale (curvature -kappa^2)")

    parser = _Parser(prog="clampedtones", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("tone", parents=[common, geom], help="fundamental tone of a geodesic ball")
    p.add_argument("--radius", type=float, required=True)

    p = sub.add_parser("twoball", parents=[common, geom], help="two-ball minimisation value")
    p.add_argument("--alpha", type=float, required=True, help="tilde radius of the smaller ball")
    p.add_argument("--total", type=float, help="tilde radius of the ball with the total volume")
    p.add_argument("--radius", type=float, help="geodesic radius of the ball with the total volume")

    p = sub.add_parser("threshold", parents=[common, geom], help="radius where the sharpness gap closes")
    p.add_argument("--step", type=float, default=0.01, help="scan step in units of 1/kappa")

    sub.add_parser("table1", parents=[common], help="small-radius comparison table")
    sub.add_parser("table2", parents=[common], help="large-radius comparison table, n = 3")

    p = sub.add_parser("scan", parents=[common, geom], help="sweep the sharpness gap over radii")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=10)

    p = sub.add_parser("oracle", parents=[common, geom], help="finite-volume cross-check")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--grid", type=int, default=512)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(parser.format_usage())
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        records = COMMANDS[args.subcommand](args)
    except DomainError as exc:
        stderr.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except (SolverError, EvaluationError, PoleError) as exc:
        stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER
    text = render(records, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
