"""
The `tauber` command.

    tauber validate    --game G
    tauber value       --game G --density D [--tail-eps E]
    tauber sweep       --config C [--out PATH] [--jobs N] [--mpi]
    tauber equivalence --config C [--out PATH] [--jobs N] [--mpi]
    tauber audit       --density D --epsilon E --M M --r0 R [--n N] [--out PATH]
    tauber demo        NAME [--seed S] [--out PATH]

Exit status: 0 ok, 1 validation failure, 2 bad input, 3 numeric failure.
Tables go to stdout, diagnostics to stderr. Files are written once,
through a temporary file and a rename.
"""
import argparse
import csv
import io
import json
import os
import sys

from tabulate import tabulate

from .classes import FamilySpec
from .consts import csv_header, float_fmt, root
from .constructions import construction_audit, pc_approximate
from .density_calculus import parse_density
from .errors import ConfigError, InvalidGame, TauberError, UnknownInstance
from .funcs import atomic_write, dyadic_grid
from .games import (builtin, builtin_names, deserialize, random_game,
                    serialize, validate)
from .tauberian import TauberSystem
from .valuation import value_backward

__all__ = ["main", "run", "load_game", "load_experiment"]


def load_game(ref, base_dir=None, checked=True):
    """
    Builtin name, or path to a game document. With checked, a game that
    fails validate raises InvalidGame.
    """
    if ref in builtin_names():
        return builtin(ref)
    path = ref
    if base_dir is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    if not os.path.exists(path):
        raise UnknownInstance("%r is neither a builtin game nor a file" % (ref,))
    with open(path) as fp:
        game = deserialize(fp.read())
    if checked:
        violations = validate(game)
        if violations:
            raise InvalidGame(violations)
    return game


def _grid(value, where):
    if isinstance(value, dict):
        if set(value) != {"dyadic"} or len(value["dyadic"]) != 2:
            raise ConfigError("%s.grid: expected {\"dyadic\": [lo, hi]}" % where)
        lo, hi = value["dyadic"]
        return dyadic_grid(int(lo), int(hi)).tolist()
    if not isinstance(value, list) or not value:
        raise ConfigError("%s.grid: expected a nonempty list" % where)
    return value


def _family(doc, where, base_dir):
    if not isinstance(doc, dict) or "kind" not in doc or "grid" not in doc:
        raise ConfigError("%s: a family needs 'kind' and 'grid'" % where)
    base = doc.get("base")
    if base is not None:
        base = parse_density(base, base_dir)
        if "approximate" in doc:
            base, _ = pc_approximate(base, int(doc["approximate"]))
    try:
        return FamilySpec(doc["kind"], _grid(doc["grid"], where), base=base,
                          tail_eps=doc.get("tail_eps"), label=doc.get("label"))
    except TauberError as err:
        raise ConfigError("%s: %s" % (where, err))


class Experiment:
    """Parsed experiment document"""

    def __init__(self, game, families, tail_eps, tol, out):
        self.game = game
        self.families = families
        self.tail_eps = tail_eps
        self.tol = tol
        self.out = out


def load_experiment(path):
    """
    {"game": name-or-path, "families": [{"kind", "grid", "base"?,
     "tail_eps"?, "approximate"?, "label"?}], "tail_eps", "tol", "out"?}

    grid is a list or {"dyadic": [lo, hi]} for 2^lo .. 2^hi; relative
    paths are taken from the document's directory.
    """
    base_dir = os.path.dirname(os.path.abspath(path))
    try:
        with open(path) as fp:
            doc = json.load(fp)
    except (OSError, ValueError) as err:
        raise ConfigError("cannot read experiment %s: %s" % (path, err))
    for key in ("game", "families", "tail_eps", "tol"):
        if key not in doc:
            raise ConfigError("$.%s: missing key" % key)
    if not isinstance(doc["families"], list) or not doc["families"]:
        raise ConfigError("$.families: expected a nonempty list")
    game = load_game(doc["game"], base_dir)
    families = [_family(f, "$.families[%d]" % i, base_dir)
                for i, f in enumerate(doc["families"])]
    out = doc.get("out")
    if out is not None and not os.path.isabs(out):
        out = os.path.join(base_dir, out)
    return Experiment(game, families, float(doc["tail_eps"]), float(doc["tol"]), out)


def _jobs(arg):
    if arg is not None:
        return arg
    env = os.environ.get("TAUBER_JOBS")
    if not env:
        return 1
    try:
        return max(int(env), 1)
    except ValueError:
        raise ConfigError("TAUBER_JOBS must be an integer, got %r" % (env,))


def _comm(use_mpi):
    if not use_mpi:
        return None
    try:
        from mpi4py import MPI
    except ImportError:
        raise ConfigError("--mpi needs the mpi4py package")
    return MPI.COMM_WORLD


def _fmt(x):
    return float_fmt % x


def _csv_text(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header)
    for family, point, state, lo, hi, dev in report.rows():
        writer.writerow((family, _fmt(point), state, _fmt(lo), _fmt(hi), _fmt(dev)))
    return buf.getvalue()


def _dat_text(label, table, deviations):
    lines = ["# %s: grid_point deviation" % label]
    lines += ["%s %s" % (_fmt(p), _fmt(d)) for p, d in zip(table.points, deviations)]
    return "\n".join(lines) + "\n"


def _stem(out):
    stem, ext = os.path.splitext(out)
    return stem if ext.lower() == ".csv" else out


def _write_report(report, out, dat):
    stem = _stem(out)
    atomic_write(stem + ".csv", _csv_text(report))
    atomic_write(stem + ".json", json.dumps(report.summary(), indent=1,
                                            sort_keys=True) + "\n")
    written = [stem + ".csv", stem + ".json"]
    if dat:
        for label, table in report.tables.items():
            path = "%s.%s.dat" % (stem, label)
            atomic_write(path, _dat_text(label, table, report.deviations[label]))
            written.append(path)
    return written


def _verdict_table(report):
    rows = []
    for label, info in report.summary()["families"].items():
        rows.append((label, info["finest_point"], info["finest_deviation"],
                     info["finest_width"], info["verdict"]))
    return tabulate(rows, headers=("family", "finest", "deviation", "width", "verdict"),
                    floatfmt=".3g")


def cmd_validate(args):
    game = load_game(args.game, checked=False)
    violations = validate(game)
    for v in violations:
        print(v, file=sys.stderr)
    if violations:
        return 1
    print("%s: ok" % args.game)
    return 0


def cmd_value(args):
    rho = parse_density(args.density)
    if args.game is None:
        raise ConfigError("value needs --game")
    game = load_game(args.game)
    br = value_backward(game, rho, args.tail_eps)
    rows = [(w, br.lo[w], br.hi[w]) for w in range(game.state_count)]
    print(tabulate(rows, headers=("state", "lo", "hi"), floatfmt=".17g"))
    return 0


def _run_experiment(args, dat):
    exp = load_experiment(args.config)
    out = args.out or exp.out
    if out is None:
        raise ConfigError("no output path: give --out or 'out' in the config")
    comm = _comm(args.mpi)
    system = TauberSystem(exp.game, exp.tail_eps, comm=comm, jobs=_jobs(args.jobs),
                          verbose=args.verbose)
    report = system.equivalence_report(exp.families, exp.tol)
    if comm is not None and comm.rank != root:
        return 0, None
    written = _write_report(report, out, dat)
    if args.verbose:
        for path in written:
            print("# wrote %s" % path, file=sys.stderr)
    return 0, report


def cmd_sweep(args):
    status, report = _run_experiment(args, dat=True)
    if report is not None:
        print("u_star = %s  disagreement = %.3g"
              % (report.u_star.tolist(), report.u_star_disagreement))
    return status


def cmd_equivalence(args):
    status, report = _run_experiment(args, dat=False)
    if report is None:
        return status
    print(_verdict_table(report))
    print("u_star = %s  disagreement = %.3g"
          % (report.u_star.tolist(), report.u_star_disagreement))
    return 0 if report.passed else 1


def cmd_audit(args):
    rho = parse_density(args.density)
    report = construction_audit(rho, args.epsilon, args.M, args.r0, n=args.n)
    print(tabulate(sorted(report.items()), headers=("quantity", "value"),
                   floatfmt=".6g"))
    if args.out:
        atomic_write(args.out, json.dumps(report, indent=1, sort_keys=True) + "\n")
    return 0


def cmd_demo(args):
    if args.name == "random":
        game = random_game(args.seed, args.states, args.amax, args.amin)
    else:
        game = builtin(args.name)
    text = serialize(game)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tauber",
        description="Weighted values of zero-sum stochastic games and "
                    "Tauberian equivalence experiments")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="check a game document")
    p.add_argument("--game", required=True, help="builtin name or path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("value", help="value bracket for one density")
    p.add_argument("--game", help="builtin name or path")
    p.add_argument("--density", required=True, help='e.g. "power:1,1,2|shift:10"')
    p.add_argument("--tail-eps", type=float, default=1e-9)
    p.set_defaults(func=cmd_value)

    for verb, func, text in (("sweep", cmd_sweep, "family tables, CSV and .dat files"),
                             ("equivalence", cmd_equivalence, "limit estimate and verdicts")):
        p = sub.add_parser(verb, help=text)
        p.add_argument("--config", required=True, help="experiment JSON document")
        p.add_argument("--out", help="output CSV path (overrides the config)")
        p.add_argument("--jobs", type=int, default=None,
                       help="local worker processes (default $TAUBER_JOBS or 1)")
        p.add_argument("--mpi", action="store_true", help="distribute over MPI ranks")
        p.add_argument("--verbose", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("audit", help="audit the constructions on a density")
    p.add_argument("--density", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--n", type=int, default=100, help="bins of the step approximation")
    p.add_argument("--out", help="write the report as JSON")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("demo", help="print a builtin or random game document")
    p.add_argument("name", help="%s or random" % ", ".join(builtin_names()))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--states", type=int, default=3)
    p.add_argument("--amax", type=int, default=2)
    p.add_argument("--amin", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_demo)
    return parser


def run(argv=None):
    """Parse argv, dispatch, and return the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except InvalidGame as err:
        for v in err.violations:
            print(v, file=sys.stderr)
        print("error: %s: game is not well formed" % args.verb, file=sys.stderr)
        return err.exit_code
    except TauberError as err:
        print("error: %s: %s" % (args.verb, err), file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print("error: %s: %s" % (args.verb, err), file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
