"""``mrl``: compress token files, inspect chains, tabulate bounds, run experiments.

Every command writes one result document (JSON or CSV) to ``--out`` or
stdout; diagnostics go to stderr, with verbosity taken from ``MRL_LOG``.
Exit codes: 0 success, 1 usage/IO/validation error, 2 statistical failure.
"""
import argparse
import csv
import io
import json
import logging
import os
import sys

from . import __version__
from .bounds import BOUNDS_COLUMNS, bounds_row, n_star
from .codec import compress, decompress, read_tokens, write_tokens
from .errors import MarkovRedundancyError
from .experiments import EXPERIMENTS
from .io import load_chain
from .spectral import eigen_reversible

log = logging.getLogger("markov_redundancy")

EXIT_OK, EXIT_ERROR, EXIT_STAT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with every other validation failure
    def error(self, message):
        raise UsageError(message)


def parse_range(text, name):
    """``a,b,c`` lists values, ``lo:hi`` doubles from lo to hi, ``lo:hi:step`` steps."""
    try:
        if ":" not in text:
            values = [int(v) for v in text.split(",")]
        else:
            parts = [int(v) for v in text.split(":")]
            if len(parts) == 2:
                lo, hi = parts
                if lo < 1:
                    raise UsageError(f"--{name} doubling range must start at >= 1")
                values = []
                while lo <= hi:
                    values.append(lo)
                    lo *= 2
            elif len(parts) == 3:
                lo, hi, step = parts
                if step < 1:
                    raise UsageError(f"--{name} step must be >= 1")
                values = list(range(lo, hi + 1, step))
            else:
                raise ValueError
    except ValueError:
        raise UsageError(f"--{name}: cannot parse range {text!r}") from None
    if not values:
        raise UsageError(f"--{name}: range {text!r} is empty")
    return values


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _json(doc):
    return json.dumps(doc, sort_keys=True) + "\n"


def cmd_compress(args):
    if args.k is None:
        raise UsageError("compress needs --k")
    if not args.out:
        raise UsageError("compress needs --out for the container file")
    x = read_tokens(args.input)
    data, report = compress(x, args.k, mode=args.mode)
    with open(args.out, "wb") as fh:
        fh.write(data)
    log.info("wrote %d bytes to %s", len(data), args.out)
    _emit(_json(report.to_dict()), None)
    return EXIT_OK


def cmd_decompress(args):
    if not args.out:
        raise UsageError("decompress needs --out for the token file")
    with open(args.input, "rb") as fh:
        x, k = decompress(fh.read())
    write_tokens(args.out, x)
    _emit(_json({"k": k, "n": int(x.size)}), None)
    return EXIT_OK


def cmd_spectrum(args):
    K, pi = load_chain(args.input)
    summary = eigen_reversible(K, pi)
    _emit(_json(summary.to_dict()), args.out)
    return EXIT_OK


def cmd_bounds(args):
    if args.davisson_C is None:
        raise UsageError("bounds needs an explicit --davisson-C: the Davisson constant is not fixed")
    if args.davisson_C <= 0:
        raise UsageError("--davisson-C must be positive")
    if args.k is None or args.n is None:
        raise UsageError("bounds needs --k and --n")
    ks = parse_range(args.k, "k")
    ns = parse_range(args.n, "n")
    if min(ks) < 2 or min(ns) < 2:
        raise UsageError("bounds needs k >= 2 and n >= 2")
    c = 1.0 if args.c is None else args.c
    columns = list(BOUNDS_COLUMNS)
    if args.epsilon is not None:
        columns.append("n_star")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for k in ks:
        ns_k = n_star(k, None, args.epsilon) if args.epsilon is not None else None
        for n in ns:
            row = bounds_row(k, n, c, args.davisson_C)
            if ns_k is not None:
                row["n_star"] = ns_k
            writer.writerow({key: repr(v) if isinstance(v, float) else v for key, v in row.items()})
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"experiment {args.name} needs {', '.join(missing)}")


def _experiment_kwargs(args):
    """Keyword arguments for one experiment; unset flags keep library defaults."""
    name = args.name
    kw = {"seed": args.seed, "threads": args.threads}
    if name == "phase-transition":
        _need(args, "k")
        kw["k_list"] = parse_range(args.k, "k")
        for flag in ("epsilon", "c", "trials"):
            if getattr(args, flag) is not None:
                kw[flag] = getattr(args, flag)
        if args.davisson_C is None:
            raise UsageError("phase-transition needs an explicit --davisson-C")
        kw["C"] = args.davisson_C
        kw["mode"] = args.mode
        return kw
    if args.k is not None:
        try:
            kw["k"] = int(args.k)
        except ValueError:
            raise UsageError(f"--k must be an integer for {name}") from None
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.n is not None:
        if name not in ("variance", "redundancy"):
            raise UsageError(f"--n does not apply to {name}")
        try:
            kw["n"] = int(args.n)
        except ValueError:
            raise UsageError("--n must be an integer") from None
    if args.c is not None:
        if name != "spectrum-concentration":
            raise UsageError(f"--c does not apply to {name}")
        kw["c"] = args.c
    if name == "redundancy":
        kw["mode"] = args.mode
    return kw


def cmd_experiment(args):
    if args.seed is None:
        raise UsageError("experiments need an explicit --seed")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.trials is not None and args.trials < (0 if args.name == "phase-transition" else 1):
        raise UsageError("--trials must be >= 1")
    result = EXPERIMENTS[args.name](**_experiment_kwargs(args))
    _emit(result.to_csv(), args.out)
    for check, ok in result.checks.items():
        log.info("%s: %s", check, "pass" if ok else "FAIL")
    if not result.passed:
        failed = [c for c, ok in result.checks.items() if not ok]
        print(f"mrl: statistical check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_STAT_FAIL
    return EXIT_OK


def build_parser():
    p = _Parser(prog="mrl", description="Markov source compression and redundancy tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("compress", help="compress a little-endian uint32 token file")
    s.add_argument("input")
    s.add_argument("--k", type=int)
    s.add_argument("--mode", choices=("exact", "fast"), default="exact")
    s.add_argument("--out")
    s.set_defaults(func=cmd_compress)

    s = sub.add_parser("decompress", help="restore the token file from a container")
    s.add_argument("input")
    s.add_argument("--out")
    s.set_defaults(func=cmd_decompress)

    s = sub.add_parser("spectrum", help="eigenvalues and gaps of a reversible chain (JSON)")
    s.add_argument("input")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("bounds", help="tabulate redundancy bounds over (k, n) ranges")
    s.add_argument("--k", help="values a,b,c; lo:hi doubling; lo:hi:step")
    s.add_argument("--n", help="same syntax as --k")
    s.add_argument("--c", type=float)
    s.add_argument("--davisson-C", dest="davisson_C", type=float)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment (CSV)")
    s.add_argument("name", choices=sorted(EXPERIMENTS))
    s.add_argument("--k", help="alphabet size; a range for phase-transition")
    s.add_argument("--n")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--c", type=float)
    s.add_argument("--davisson-C", dest="davisson_C", type=float)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--mode", choices=("exact", "fast"), default="exact")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_experiment)
    return p


def _configure_logging():
    level = os.environ.get("MRL_LOG", "WARNING").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv=None):
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"mrl: {exc}", file=sys.stderr)
    except (MarkovRedundancyError, ValueError, OSError, RuntimeError) as exc:
        print(f"mrl: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
