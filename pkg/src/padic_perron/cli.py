"""Command-line front end: ``padic-perron <command> [options]``."""

import argparse
import json
import os
import sys

from .charpoly import CharPoly, char_poly, newton_polygon, root_valuations
from .errors import CertificationError, InputError, PerronError, PrecisionError
from .field import LAURENT, PADIC, FieldContext
from .linalg import parse_matrix
from .perron import DEFAULT_MAX_SQUARINGS, analyze, certify_strict_max
from .verify import ELL_POLICIES, CampaignConfig, CounterexampleSpec, run_campaign, verify_counterexample

EXIT_OK, EXIT_INPUT, EXIT_UNCERTIFIED = 0, 2, 3
PRECISION_ENV = "PADIC_PERRON_PRECISION"
DEFAULT_PRECISION = 64
MIN_PRECISION = 8
FIELDS = {"p-adic": PADIC, "laurent": LAURENT}
COMMANDS = ("analyze", "charpoly", "polygon", "eigen", "project", "counterexample", "campaign")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _precision_default():
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", choices=sorted(FIELDS), default="p-adic")
    common.add_argument("--p", help="prime (campaign accepts a comma-separated list)")
    common.add_argument("--precision", type=int, default=None, help=f"digits, >= {MIN_PRECISION}")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", help="path to a matrix JSON file ('-' for stdin)")
    src.add_argument("--matrix", help="inline matrix JSON")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-squarings", type=int, default=DEFAULT_MAX_SQUARINGS)

    parser = _Parser(prog="padic-perron", description="Perron-Frobenius certificates over non-Archimedean fields.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("analyze", "charpoly", "eigen", "project"):
        sub.add_parser(name, parents=[common])
    poly = sub.add_parser("polygon", parents=[common])
    poly.add_argument("--coeffs", help="comma-separated c_0,...,c_{n-1} of a monic polynomial")
    ce = sub.add_parser("counterexample", parents=[common])
    ce.add_argument("--n", type=int, required=True)
    camp = sub.add_parser("campaign", parents=[common])
    camp.add_argument("--n", type=int, default=6, help="largest dimension sampled")
    camp.add_argument("--trials", type=int, default=100)
    camp.add_argument("--seed", type=int, default=0)
    camp.add_argument("--l-policy", choices=ELL_POLICIES, default="minimal")
    camp.add_argument("--workers", type=int, default=1)
    return parser


def _prime(text):
    try:
        return int(text)
    except (TypeError, ValueError):
        raise InputError(f"--p must be an integer prime, got {text!r}") from None


def _context(args):
    if args.p is None:
        raise InputError("--p is required")
    return FieldContext(FIELDS[args.field], _prime(args.p), args.precision)


def _read_matrix(args, ctx):
    if args.matrix is not None:
        text = args.matrix
    elif args.input is not None:
        try:
            if args.input == "-":
                text = sys.stdin.read()
            else:
                with open(args.input, encoding="utf-8") as fh:
                    text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    else:
        raise InputError("a matrix is required: pass --input <path> or --matrix <json>")
    return parse_matrix(text, ctx)


def _field_json(ctx):
    return {"kind": ctx.kind, "p": ctx.p, "precision": ctx.precision, "name": ctx.name}


def _polygon_report(ctx, f):
    pg = newton_polygon(f, ctx)
    return {
        "field": _field_json(ctx),
        "charpoly": f.to_json(),
        "charpoly_text": str(f),
        "polygon": pg.to_json(),
        "root_valuations": [{"valuation": str(v), "count": c} for v, c in root_valuations(pg)],
        "strict_max": certify_strict_max(pg, ctx).to_json(),
    }


def _cmd_analyze(args):
    ctx = _context(args)
    return analyze(_read_matrix(args, ctx), ctx, args.max_squarings).to_json(), EXIT_OK


def _cmd_charpoly(args):
    ctx = _context(args)
    A = _read_matrix(args, ctx)
    f = char_poly(A)
    return {
        "field": _field_json(ctx),
        "matrix": A.to_json(),
        "charpoly": f.to_json(),
        "charpoly_text": str(f),
    }, EXIT_OK


def _cmd_polygon(args):
    ctx = _context(args)
    if args.coeffs is not None:
        if args.matrix is not None or args.input is not None:
            raise InputError("--coeffs cannot be combined with a matrix")
        parts = [s for s in args.coeffs.split(",")]
        if not all(s.strip() for s in parts):
            raise InputError("--coeffs must be a comma-separated list of scalars")
        f = CharPoly(tuple(ctx.parse_scalar(s) for s in parts))
    else:
        f = char_poly(_read_matrix(args, ctx))
    return _polygon_report(ctx, f), EXIT_OK


def _subset(report, keys):
    return {k: report[k] for k in keys}


def _cmd_eigen(args):
    out, status = _cmd_analyze(args)
    return _subset(out, ("field", "finding", "flags", "hypothesis", "lambda_max", "eigenvector")), status


def _cmd_project(args):
    out, status = _cmd_analyze(args)
    return _subset(out, ("field", "finding", "flags", "lambda_max", "projection")), status


def _cmd_counterexample(args):
    if args.field != "p-adic":
        raise InputError("the counterexample family is defined over Q_p only")
    spec = CounterexampleSpec(_prime(args.p), args.n)
    report = verify_counterexample(spec, args.precision)
    return report.to_json(), EXIT_OK if report.ok else EXIT_UNCERTIFIED


def _cmd_campaign(args):
    if args.p is None:
        raise InputError("--p is required (e.g. --p 2,3,5,7)")
    primes = tuple(_prime(s) for s in args.p.split(","))
    cfg = CampaignConfig(
        primes=primes,
        max_dimension=args.n,
        trials=args.trials,
        seed=args.seed,
        ell_policy=args.l_policy,
        precision=args.precision,
        field=FIELDS[args.field],
        max_squarings=args.max_squarings,
        workers=args.workers,
    )
    report = run_campaign(cfg)
    return report.to_json(), EXIT_OK if report.ok else EXIT_UNCERTIFIED


HANDLERS = {name: globals()[f"_cmd_{name}"] for name in COMMANDS}


def dump_json(report):
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def render_text(report):
    """Indented key/value projection of a JSON report."""
    lines = []
    _render(report, 0, lines)
    return "\n".join(lines) + "\n"


def _scalar(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _compact(v):
    """Inline form for a valued element or a valuation bound, else None."""
    if not isinstance(v, dict):
        return None
    if set(v) == {"value", "exact"}:
        return _scalar(v["value"]) if v["exact"] else f">={_scalar(v['value'])}"
    if {"unit", "val", "precision"} <= set(v) <= {"unit", "val", "precision", "absprec"}:
        if v["unit"] is None:
            return f"0 (abs. precision {_scalar(v.get('absprec'))})"
        return f"unit {v['unit']}, val {v['val']}, rel. precision {v['precision']}"
    return None


def _is_flat(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v):
    if _compact(v) is not None:
        return _compact(v)
    if not isinstance(v, list):
        return None
    if _is_flat(v):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, list) and all(_is_flat(x) for x in v):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    return None


def _render(value, depth, lines):
    pad = "  " * depth
    if isinstance(value, dict):
        for key, v in value.items():
            label = key.replace("_", " ")
            inline = _inline(v)
            if isinstance(v, (dict, list)) and v and inline is None:
                lines.append(f"{pad}{label}:")
                _render(v, depth + 1, lines)
            else:
                lines.append(f"{pad}{label}: {inline if inline is not None else _scalar(v)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and _inline(item) is None:
                lines.append(f"{pad}-")
                _render(item, depth + 1, lines)
            else:
                lines.append(f"{pad}- {_inline(item) or _scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, run one command, write the report; return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.precision is None:
            args.precision = _precision_default()
        if args.precision < MIN_PRECISION:
            raise InputError(f"--precision must be at least {MIN_PRECISION}, got {args.precision}")
        if args.max_squarings < 1:
            raise InputError("--max-squarings must be positive")
        report, status = HANDLERS[args.command](args)
    except (CertificationError, PrecisionError) as exc:
        print(f"padic-perron: could not certify: {exc}", file=stderr)
        return EXIT_UNCERTIFIED
    except (PerronError, ValueError) as exc:
        print(f"padic-perron: error: {exc}", file=stderr)
        return EXIT_INPUT
    stdout.write(dump_json(report) if args.format == "json" else render_text(report))
    return status


def main(argv=None):
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
