"""JSON/CSV readers and writers for every artifact schema.

Doubles are written with 17 significant digits so that every value
round-trips exactly; writers go through a temp file and ``os.replace``.
"""
import csv
import io
import json
import math
import os
import tempfile
from importlib import resources

import numpy as np

from .correlations import CorrelationTable
from .exceptions import MalformedInput
from .games import Game
from .lift import ApproxRepSequence
from .player import PlayerRep, TraceSpec

__all__ = [
    "dumps",
    "write_text_atomic",
    "load_json",
    "matrix_to_json",
    "matrix_from_json",
    "rep_to_json",
    "rep_from_json",
    "trace_to_json",
    "trace_from_json",
    "table_to_json",
    "table_from_json",
    "table_to_csv",
    "sequence_to_json",
    "sequence_from_json",
    "game_to_json",
    "game_from_json",
    "builtin_game",
    "builtin_games",
    "rows_to_csv",
]


def _fmt_float(x):
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".17g")
    return s if s not in ("-0",) else "-0.0"


def _is_leaf(v):
    return not isinstance(v, (list, tuple, dict, np.ndarray))


def _is_flat(v):
    if isinstance(v, np.ndarray):
        v = v.tolist()
    return _is_leaf(v) or (isinstance(v, (list, tuple)) and all(_is_leaf(u) for u in v))


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + ",".join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # scalars and lists of scalars stay on one line to keep matrix rows readable
        if all(_is_flat(v) for v in obj):
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + ",".join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=1):
    """JSON text with 17-significant-digit doubles and a trailing newline."""
    return _encode(obj, indent, 0) + "\n"


def write_text_atomic(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path):
    """Parse a JSON file, turning syntax errors into :class:`MalformedInput`."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise MalformedInput(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedInput(f"{where}: missing key {key!r}")
    return obj[key]


def _as_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise MalformedInput(f"{where}: expected a positive integer, got {value!r}")
    return value


def matrix_to_json(a):
    a = np.asarray(a, dtype=np.complex128)
    return {
        "dim": a.shape[0],
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def matrix_from_json(obj, where="matrix"):
    n = _as_int(_require(obj, "dim", where), f"{where}.dim")
    entries = _require(obj, "entries", where)
    try:
        arr = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}.entries: not a numeric array ({exc})") from exc
    if arr.shape != (n, n, 2):
        raise MalformedInput(f"{where}.entries: expected shape ({n}, {n}, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInput(f"{where}.entries: non-finite value")
    return arr[..., 0] + 1j * arr[..., 1]


def _stack_from_json(nested, X, A, where):
    if not isinstance(nested, list) or len(nested) != X:
        raise MalformedInput(f"{where}: expected {X} questions")
    rows = []
    for x, per_q in enumerate(nested):
        if not isinstance(per_q, list) or len(per_q) != A:
            raise MalformedInput(f"{where}[{x}]: expected {A} answers")
        rows.append([matrix_from_json(m, f"{where}[{x}][{a}]") for a, m in enumerate(per_q)])
    dims = {m.shape[0] for row in rows for m in row}
    if len(dims) != 1:
        raise MalformedInput(f"{where}: matrices have different dimensions {sorted(dims)}")
    return np.array(rows)


def rep_to_json(rep):
    return {
        "dim": rep.dim,
        "questions": rep.questions,
        "answers": rep.answers,
        "pvms": [[matrix_to_json(p) for p in per_q] for per_q in rep.pvms],
    }


def _rep_header(obj, where):
    X = _as_int(_require(obj, "questions", where), f"{where}.questions")
    A = _as_int(_require(obj, "answers", where), f"{where}.answers")
    return X, A


def rep_from_json(obj, where="rep"):
    X, A = _rep_header(obj, where)
    stack = _stack_from_json(_require(obj, "pvms", where), X, A, f"{where}.pvms")
    if "dim" in obj and obj["dim"] != stack.shape[-1]:
        raise MalformedInput(f"{where}.dim = {obj['dim']} disagrees with matrix size {stack.shape[-1]}")
    return PlayerRep(stack)


def trace_to_json(tau):
    return {"blocks": [{"dim": n, "weight": w} for n, w in zip(tau.block_dims, tau.weights)]}


def trace_from_json(obj, where="trace"):
    blocks = _require(obj, "blocks", where)
    if not isinstance(blocks, list) or not blocks:
        raise MalformedInput(f"{where}.blocks: expected a non-empty list")
    dims = [_as_int(_require(b, "dim", f"{where}.blocks"), f"{where}.blocks.dim") for b in blocks]
    weights = [_require(b, "weight", f"{where}.blocks") for b in blocks]
    try:
        return TraceSpec(dims, weights)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}: {exc}") from exc


def table_to_json(t):
    return {"questions": t.questions, "answers": t.answers, "values": t.values}


def table_from_json(obj, where="table"):
    X, A = _rep_header(obj, where)
    try:
        values = np.array(_require(obj, "values", where), dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}.values: not a numeric array ({exc})") from exc
    if values.shape != (A, A, X, X):
        raise MalformedInput(f"{where}.values: expected shape {(A, A, X, X)}, got {values.shape}")
    return CorrelationTable(values)


def rows_to_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [_fmt_float(float(v)) if isinstance(v, (float, np.floating)) and math.isfinite(v) else v for v in row]
        )
    return buf.getvalue()


def table_to_csv(t):
    A, X = t.answers, t.questions
    rows = (
        (a, b, x, y, float(t.values[a, b, x, y]))
        for a in range(A)
        for b in range(A)
        for x in range(X)
        for y in range(X)
    )
    return rows_to_csv(["a", "b", "x", "y", "p"], rows)


def sequence_to_json(s):
    return {
        "questions": s.questions,
        "answers": s.answers,
        "indices": [
            {"dim": arr.shape[-1], "tuples": [[matrix_to_json(m) for m in per_q] for per_q in arr]}
            for arr in s.indices
        ],
    }


def sequence_from_json(obj, where="sequence"):
    X, A = _rep_header(obj, where)
    indices = _require(obj, "indices", where)
    if not isinstance(indices, list):
        raise MalformedInput(f"{where}.indices: expected a list")
    stacks = []
    for n, entry in enumerate(indices):
        stack = _stack_from_json(_require(entry, "tuples", f"{where}.indices[{n}]"), X, A, f"{where}.indices[{n}].tuples")
        if "dim" in entry and entry["dim"] != stack.shape[-1]:
            raise MalformedInput(f"{where}.indices[{n}].dim disagrees with matrix size")
        stacks.append(stack)
    return ApproxRepSequence(stacks, X, A)


def game_to_json(g):
    out = {
        "questions": g.questions,
        "answers": g.answers,
        "synchronous": g.synchronous,
        "lambda": g.lam,
        "predicate": g.predicate.astype(int),
    }
    if g.name:
        out["name"] = g.name
    return out


def game_from_json(obj, where="game"):
    X, A = _rep_header(obj, where)
    try:
        lam = np.array(_require(obj, "lambda", where), dtype=float)
        pred = np.array(_require(obj, "predicate", where))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}: {exc}") from exc
    if lam.shape != (X, X) or pred.shape != (A, A, X, X):
        raise MalformedInput(f"{where}: lambda/predicate shapes {lam.shape}/{pred.shape} do not match X={X}, A={A}")
    try:
        return Game(lam, pred, synchronous=bool(obj.get("synchronous", True)), name=obj.get("name", ""))
    except ValueError as exc:
        raise MalformedInput(f"{where}: {exc}") from exc


def builtin_games():
    root = resources.files("synclift") / "data" / "games"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def builtin_game(name):
    path = resources.files("synclift") / "data" / "games" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no built-in game {name!r}; available: {builtin_games()}")
    return game_from_json(json.loads(path.read_text(encoding="utf-8")), where=name)
