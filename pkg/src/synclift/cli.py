"""Command-line interface: ``synclift {verify-bound,round,correlate,pipeline,game}``.

Exit codes: 0 success, 2 validation or property failure, 64 usage error,
65 malformed input.  Primary outputs go to ``--out DIR`` (or stdout when
no directory is given); diagnostics go to stderr.
"""
import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from ._config import tolerance_context, tolerance_names
from .correlations import check_table, correlation_from_rep, pipeline_correlations
from .exceptions import MalformedInput, SyncLiftError
from .games import classical_sync_value, game_value, seesaw_optimize
from .io import (
    builtin_game,
    builtin_games,
    dumps,
    game_from_json,
    load_json,
    matrix_from_json,
    rep_from_json,
    rep_to_json,
    rows_to_csv,
    sequence_from_json,
    table_from_json,
    table_to_csv,
    table_to_json,
    trace_from_json,
    write_text_atomic,
)
from .lift import lift_sequence, merge_reports, orthogonalize_tuple, spectral_round
from .linalg import StateVectorSpec, random_positive_contraction
from .player import PlayerRep, validate_player_rep

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

RATIO_FLOOR = 1e-10

log = logging.getLogger("synclift")

DEFECT_COLUMNS = [
    "index",
    "question",
    "element",
    "projection_defect",
    "rounding_distance",
    "certified_bound",
    "original_distance",
    "padded",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _dims(text):
    """Parse ``"1..16"`` or ``"1,2,4"`` (or a mix: ``"1..4,8,16"``)."""
    dims = []
    try:
        for part in text.split(","):
            if ".." in part:
                lo, hi = part.split("..")
                dims.extend(range(int(lo), int(hi) + 1))
            else:
                dims.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}")
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got {text!r}")
    return dims


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=7, help="RNG seed (PCG64), default 7")
    common.add_argument("--out", metavar="DIR", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    for name in tolerance_names():
        common.add_argument(f"--tol.{name}", dest=f"tol_{name}", type=float, metavar="X")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser():
    common = _common_flags()
    parser = _Parser(prog="synclift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"synclift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-bound", parents=[common], help="check ||a - p(a)|| <= 2 ||a^2 - a|| on random inputs")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dims", type=_dims, default=[1, 2, 3, 4, 8, 16], help='e.g. "1..16" or "1,2,4"')
    p.add_argument("--half-identity", action="store_true", help="use a = I/2 in every trial")
    p.set_defaults(func=cmd_verify_bound)

    p = sub.add_parser("round", parents=[common], help="round approximate PVMs to exact PVMs")
    p.add_argument("input", help="PlayerRep, tuple-family or ApproxRepSequence JSON")
    p.add_argument("--mode", choices=("pad_last", "report_only"), default="pad_last")
    p.add_argument("--state-density", metavar="FILE", help="matrix JSON of the state used for 2-norms")
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("correlate", parents=[common], help="correlation table of a representation")
    p.add_argument("rep", help="PlayerRep JSON")
    p.add_argument("--trace", metavar="FILE", help="TraceSpec JSON (default: normalized trace)")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("pipeline", parents=[common], help="lift a sequence and track convergence to a table")
    p.add_argument("sequence", help="ApproxRepSequence JSON")
    p.add_argument("target", help="CorrelationTable JSON")
    p.add_argument("--metric", choices=("sup", "l1"), default="sup")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("game", parents=[common], help="game values: table, classical oracle or seesaw")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("game_file", nargs="?", help="Game JSON")
    src.add_argument("--builtin", metavar="NAME", help=f"built-in game ({', '.join(builtin_games())})")
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--table", metavar="FILE", help="evaluate the game on this correlation table")
    how.add_argument("--classical", action="store_true", help="exhaustive deterministic strategies")
    how.add_argument("--seesaw", action="store_true", help="local search over PVM strategies")
    p.add_argument("--dim", type=_positive_int, default=None, help="seesaw dimension (default: answers)")
    p.add_argument("--iters", type=_positive_int, default=200)
    p.add_argument("--step", type=float, default=0.1)
    p.set_defaults(func=cmd_game)
    return parser


def _emit(args, filename, text):
    if args.out:
        path = os.path.join(args.out, filename)
        write_text_atomic(path, text)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def _note(args, message):
    # summaries go to stdout only when stdout is not carrying the primary output
    print(message, file=sys.stdout if args.out else sys.stderr)


def cmd_verify_bound(args):
    if args.trials < 1:
        raise UsageError(f"--trials must be >= 1, got {args.trials}")
    rows = []
    violations = 0
    for t in range(args.trials):
        dim = args.dims[t % len(args.dims)]
        rng = np.random.default_rng([args.seed, t])
        if args.half_identity:
            a = np.eye(dim, dtype=np.complex128) / 2
        elif t % 10 == 9:
            # equality family: spectrum in {0, 1/2, 1} with at least one 1/2
            spectrum = rng.choice([0.0, 0.5, 1.0], size=dim)
            spectrum[rng.integers(dim)] = 0.5
            a = random_positive_contraction(dim, rng, spectrum=spectrum)
        else:
            a = random_positive_contraction(dim, rng)
        state = None if t % 6 == 0 else StateVectorSpec.random_faithful(dim, rng)
        _, r = spectral_round(a, state)
        ok = r.distance <= r.bound + 1e-10
        violations += not ok
        # both sides at rounding-noise level: the ratio carries no information
        ratio = r.distance / r.bound if r.bound > RATIO_FLOOR else 0.0
        rows.append((t, dim, args.seed, r.distance, r.bound, ratio))
    _emit(args, "verify_bound.csv", rows_to_csv(["trial", "dim", "seed", "distance", "bound", "ratio"], rows))
    max_ratio = max(row[-1] for row in rows)
    witness = []
    for dim in args.dims:
        _, r = spectral_round(np.eye(dim) / 2)
        witness.append(abs(r.distance / r.bound - 1.0) <= 1e-12)
    _note(args, f"trials={args.trials} violations={violations} max_ratio={max_ratio!r}")
    _note(args, f"half-identity witness attains ratio 1: {all(witness)}")
    return EXIT_OK if violations == 0 else EXIT_INVALID


def _load_state(args, dim):
    if not args.state_density:
        return None
    rho = matrix_from_json(load_json(args.state_density), "state")
    if rho.shape[0] != dim:
        raise MalformedInput(f"state density has dim {rho.shape[0]}, input has dim {dim}")
    try:
        return StateVectorSpec(rho)
    except ValueError as exc:
        raise MalformedInput(f"{args.state_density}: {exc}") from exc


def _defect_rows(index, report, answers):
    for k, e in enumerate(report.per_element):
        yield (index, k // answers, k % answers, e.projection_defect, e.rounding_distance,
               e.certified_bound, e.original_distance, int(e.padded))


def _read_round_input(path):
    obj = load_json(path)
    if isinstance(obj, dict) and "indices" in obj:
        return "sequence", sequence_from_json(obj)
    if isinstance(obj, dict) and ("pvms" in obj or "tuples" in obj):
        # a single index: a PlayerRep, or one tuple family per question
        key = "pvms" if "pvms" in obj else "tuples"
        wrapped = {"questions": obj.get("questions"), "answers": obj.get("answers"), "indices": [{"tuples": obj[key]}]}
        return "single", sequence_from_json(wrapped, where=path)
    raise MalformedInput(f"{path}: expected keys 'pvms', 'tuples' or 'indices'")


def cmd_round(args):
    kind, seq = _read_round_input(args.input)
    X, A = seq.questions, seq.answers
    if kind == "single":
        arr = seq.indices[0]
        state = _load_state(args, arr.shape[-1])
        pvms = np.empty_like(arr)
        reports = []
        for x in range(X):
            pvms[x], rep_report = orthogonalize_tuple(arr[x], state, args.mode)
            reports.append(rep_report)
        reps, merged = [PlayerRep(pvms)], [merge_reports(reports)]
        errors = {}
    else:
        if args.state_density:
            raise UsageError("--state-density applies to single-index inputs only")
        lifted = lift_sequence(seq, args.mode)
        reps, merged, errors = lifted.reps, lifted.reports, lifted.errors
    for n, exc in errors.items():
        log.error("index %d failed: %s", n, exc)
    valid = not errors
    for n, rep in enumerate(reps):
        if rep is not None:
            vr = validate_player_rep(rep)
            if not vr.valid:
                valid = False
                _note(args, f"index {n}: output is not a PVM: {vr.summary()}")
    if kind == "single":
        rounded = rep_to_json(reps[0])
        report_json = merged[0].to_dict()
    else:
        rounded = {"reps": [rep_to_json(r) if r is not None else None for r in reps]}
        report_json = {"reports": [r.to_dict() if r is not None else None for r in merged]}
    _emit(args, "rounded.json", dumps(rounded))
    if args.out:
        rows = [row for n, r in enumerate(merged) if r is not None for row in _defect_rows(n, r, A)]
        _emit(args, "defects.json", dumps(report_json))
        _emit(args, "defects.csv", rows_to_csv(DEFECT_COLUMNS, rows))
    return EXIT_OK if valid else EXIT_INVALID


def cmd_correlate(args):
    rep = rep_from_json(load_json(args.rep), where=args.rep)
    tau = trace_from_json(load_json(args.trace), where=args.trace) if args.trace else None
    vr = validate_player_rep(rep)
    if not vr.valid:
        _note(args, f"representation fails PVM validation: {vr.summary()}")
        return EXIT_INVALID
    table = correlation_from_rep(rep, tau)
    if args.format == "csv":
        _emit(args, "table.csv", table_to_csv(table))
    else:
        _emit(args, "table.json", dumps(table_to_json(table)))
    tr = check_table(table)
    if not tr.valid:
        _note(args, f"table fails validation: {tr}")
        return EXIT_INVALID
    return EXIT_OK


def cmd_pipeline(args):
    seq = sequence_from_json(load_json(args.sequence), where=args.sequence)
    if len(seq) == 0:
        raise MalformedInput(f"{args.sequence}: sequence has no indices")
    target = table_from_json(load_json(args.target), where=args.target)
    report = pipeline_correlations(seq, target, metric=args.metric)
    header = ["index", "dim", "max_defect", "certified_bound", "distance", "status"]
    rows = [[r[h] for h in header] for r in report.rows()]
    _emit(args, "convergence.csv", rows_to_csv(header, rows))
    n_ok = sum(st == "ok" for st in report.status)
    _note(args, f"indices ok: {n_ok}/{len(seq)}; final {args.metric} distance {report.final_distance!r}")
    return EXIT_OK if n_ok else EXIT_INVALID


def cmd_game(args):
    if args.builtin:
        try:
            game = builtin_game(args.builtin)
        except KeyError as exc:
            raise UsageError(str(exc.args[0]))
    else:
        game = game_from_json(load_json(args.game_file), where=args.game_file)
    result = {"game": game.name or (args.game_file or args.builtin), "questions": game.questions, "answers": game.answers}
    if args.table:
        table = table_from_json(load_json(args.table), where=args.table)
        result.update(mode="table", value=game_value(game, table))
    elif args.classical:
        value, f = classical_sync_value(game)
        result.update(mode="classical", value=value, argmax=list(f))
    else:
        dim = args.dim or game.answers
        res = seesaw_optimize(game, dim, args.iters, args.seed, step=args.step)
        result.update(mode="seesaw", dim=dim, iters=args.iters, seed=args.seed, **res.to_dict())
        result["rep"] = rep_to_json(res.rep)
    _emit(args, "game_result.json", dumps(result))
    _note(args, f"value = {result['value']!r}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    overrides = {n: getattr(args, f"tol_{n}") for n in tolerance_names() if getattr(args, f"tol_{n}") is not None}
    try:
        with tolerance_context(**overrides):
            return args.func(args)
    except UsageError as exc:
        print(f"synclift: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedInput, SyncLiftError, ValueError) as exc:
        print(f"synclift: malformed input: {exc}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
