"""Synchronous nonlocal games: values, a classical brute-force oracle and a seesaw optimizer."""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._config import get_tol
from .correlations import CorrelationTable, correlation_from_rep, moment_matrix
from .exceptions import SearchSpaceTooLarge, ShapeMismatch
from .lift import orthogonalize_tuple
from .linalg import clamp_spectrum
from .player import PlayerRep, deterministic_rep, random_rep

__all__ = [
    "Game",
    "OptimizationResult",
    "game_value",
    "classical_sync_value",
    "seesaw_optimize",
    "coloring_game",
    "MAX_CLASSICAL_SEARCH",
]

MAX_CLASSICAL_SEARCH = 10**7


@dataclass
class Game:
    """Question distribution ``lam[x, y]`` and 0/1 predicate ``predicate[a, b, x, y]``."""

    lam: np.ndarray
    predicate: np.ndarray
    synchronous: bool = True
    name: str = ""

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        pred = np.asarray(self.predicate)
        if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
            raise ShapeMismatch(f"lambda must be square, got shape {lam.shape}")
        if pred.ndim != 4 or pred.shape[0] != pred.shape[1] or pred.shape[2:] != lam.shape:
            raise ShapeMismatch(f"predicate must have shape (A, A, X, X), got {pred.shape}")
        if np.any(lam < 0) or abs(math.fsum(lam.ravel()) - 1.0) > get_tol("trace"):
            raise ValueError("lambda must be a probability distribution over question pairs")
        if not np.all((pred == 0) | (pred == 1)):
            raise ValueError("predicate entries must be 0 or 1")
        pred = pred.astype(np.int8)
        if self.synchronous:
            diag = np.einsum("abxx->abx", pred)
            off = ~np.eye(pred.shape[0], dtype=bool)
            if np.any(diag[off] != 0):
                raise ValueError("synchronous game must reject different answers to equal questions")
        self.lam, self.predicate = lam, pred

    @property
    def questions(self):
        return self.lam.shape[0]

    @property
    def answers(self):
        return self.predicate.shape[0]

    def weights(self):
        """``lam[x, y] * V[a, b, x, y]`` as an ``(A, A, X, X)`` array."""
        return self.predicate * self.lam[None, None, :, :]


def game_value(g, t):
    """``sum_{x,y} lam(x,y) sum_{a,b} V(a,b|x,y) p(ab|xy)``, summed with ``math.fsum``."""
    if not isinstance(t, CorrelationTable):
        t = CorrelationTable(t)
    if t.values.shape != g.predicate.shape:
        raise ShapeMismatch(f"table shape {t.values.shape} does not match game {g.predicate.shape}")
    return math.fsum((g.weights() * t.values).ravel())


def coloring_game(n_vertices, edges, colors, name=""):
    """Synchronous ``colors``-coloring game of a graph.

    Questions are vertices.  ``lam`` is uniform over the ordered pairs
    ``(x, x)`` and ``(x, y)``/``(y, x)`` for each edge; equal vertices must get
    equal colors and adjacent ones different colors.
    """
    lam = np.zeros((n_vertices, n_vertices))
    pred = np.ones((colors, colors, n_vertices, n_vertices), dtype=np.int8)
    same = np.eye(colors, dtype=np.int8)
    for x in range(n_vertices):
        lam[x, x] = 1.0
        pred[:, :, x, x] = same
    for x, y in edges:
        lam[x, y] = lam[y, x] = 1.0
        pred[:, :, x, y] = pred[:, :, y, x] = 1 - same
    return Game(lam / lam.sum(), pred, synchronous=True, name=name)


def _strategy_value(g, f):
    x = np.arange(g.questions)
    # V[f(x), f(y), x, y] for all (x, y)
    v = g.predicate[f[:, None], f[None, :], x[:, None], x[None, :]]
    return math.fsum((g.lam * v).ravel())


def classical_sync_value(g):
    """Exhaustive best deterministic strategy ``f: X -> A``.

    Returns ``(value, argmax)``; ties are broken towards the
    lexicographically smallest ``f``.
    """
    X, A = g.questions, g.answers
    if A**X > MAX_CLASSICAL_SEARCH:
        raise SearchSpaceTooLarge(f"{A}^{X} strategies exceed the limit {MAX_CLASSICAL_SEARCH}")
    # itertools.product enumerates in lexicographic order
    strategies = np.array(list(itertools.product(range(A), repeat=X)), dtype=np.intp)
    w = g.weights()
    scores = np.zeros(len(strategies))
    for x in range(X):
        for y in range(X):
            if g.lam[x, y]:
                scores += w[strategies[:, x], strategies[:, y], x, y]
    # float summation order can split exact ties; re-score near-maximal candidates exactly
    best_value, best_f = -1.0, None
    for i in np.flatnonzero(scores >= scores.max() - 1e-9):
        value = _strategy_value(g, strategies[i])
        if value > best_value:
            best_value, best_f = value, strategies[i]
    return best_value, tuple(int(a) for a in best_f)


@dataclass
class OptimizationResult:
    rep: PlayerRep
    value: float
    trajectory: list = field(default_factory=list)
    rounding_invocations: int = 0

    def to_dict(self):
        return {
            "value": self.value,
            "trajectory": [[int(i), float(v)] for i, v in self.trajectory],
            "rounding_invocations": self.rounding_invocations,
        }


def _value_gradient(g, pvms):
    """Gradient of the normalized-trace value with respect to each ``e(a|x)``."""
    d = pvms.shape[-1]
    w = g.weights()
    # coefficient of tr(e(a|x) e(b|y)) seen from both slots
    coef = np.transpose(w, (2, 0, 3, 1)) + np.transpose(w, (3, 1, 2, 0))
    return np.einsum("xayb,ybij->xaij", coef, pvms) / d


def _rep_value(g, rep):
    # rep comes out of orthogonalize_tuple, so skip re-validating it
    moments = moment_matrix(rep).real
    return game_value(g, CorrelationTable(np.transpose(moments, (1, 3, 0, 2))))


def seesaw_optimize(g, dim, iters, seed, step=0.1):
    """Projected ascent over ``dim``-dimensional PVM strategies.

    Each iteration takes a fixed gradient step on every measurement,
    clamps the spectra back into ``[0, 1]`` and rounds each question's
    tuple to an exact PVM with :func:`orthogonalize_tuple`.  The value is
    not monotone along the trajectory; the best iterate is returned.
    """
    if dim < 1 or iters < 1:
        raise ValueError("dim and iters must be positive")
    rep = random_rep(dim, g.questions, g.answers, seed, allow_zero=g.answers > dim)
    value = _rep_value(g, rep)
    best = OptimizationResult(rep, value, [(0, value)])
    rounds = 0
    for it in range(1, iters + 1):
        grad = _value_gradient(g, rep.pvms)
        new = np.empty_like(rep.pvms)
        for x in range(g.questions):
            relaxed = np.array([clamp_spectrum(e) for e in rep.pvms[x] + step * grad[x]])
            new[x], _ = orthogonalize_tuple(relaxed, mode="pad_last")
            rounds += 1
        rep = PlayerRep(new)
        value = _rep_value(g, rep)
        best.trajectory.append((it, value))
        if value > best.value:
            best.rep, best.value = rep, value
    best.rounding_invocations = rounds
    return best


def deterministic_table(f, questions, answers):
    return correlation_from_rep(deterministic_rep(f, questions, answers))
