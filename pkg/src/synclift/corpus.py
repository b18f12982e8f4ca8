"""Deterministic experiment corpus: built-in games and fixture files.

``python -m synclift.corpus DIR`` regenerates everything under ``DIR``;
the copies shipped in ``synclift/data`` were produced this way.
"""
import os
import sys

import numpy as np

from .correlations import correlation_from_rep
from .games import Game, coloring_game
from .io import dumps, game_to_json, rep_to_json, sequence_to_json, table_to_json, write_text_atomic
from .lift import ApproxRepSequence
from .player import PlayerRep, deterministic_rep, random_rep

BASE_REP = dict(dim=4, questions=2, answers=2, seed=7)
SEQUENCE_SEED = 100
SEQUENCE_LENGTH = 12

K3_EDGES = [(0, 1), (1, 2), (0, 2)]
C5_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]


def shrinking_schedule(length=SEQUENCE_LENGTH):
    """``eps_n = 2**-n`` for ``n = 1..length``."""
    return [2.0**-n for n in range(1, length + 1)]


def base_rep():
    return random_rep(**BASE_REP)


def shrinking_sequence():
    return ApproxRepSequence.from_perturbations(base_rep(), shrinking_schedule(), SEQUENCE_SEED)


def constant_sequence(length=4):
    rep = base_rep()
    return ApproxRepSequence([rep.pvms.copy() for _ in range(length)], rep.questions, rep.answers)


def mub_rep():
    """Qubit with the computational basis for question 0 and the Hadamard basis for question 1."""
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    minus = np.array([1.0, -1.0]) / np.sqrt(2)
    pvms = np.array(
        [
            [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])],
            [np.outer(plus, plus), np.outer(minus, minus)],
        ],
        dtype=np.complex128,
    )
    return PlayerRep(pvms)


def games():
    x = np.ones((1, 1))
    return {
        "k3_2col": coloring_game(3, K3_EDGES, 2, name="K3 2-coloring"),
        "k3_3col": coloring_game(3, K3_EDGES, 3, name="K3 3-coloring"),
        "c5_3col": coloring_game(5, C5_EDGES, 3, name="pentagon 3-coloring"),
        "trivial_equal": Game(x, np.eye(2, dtype=int)[:, :, None, None], name="single question, equal answers"),
        "trivial_accept": Game(
            np.full((2, 2), 0.25), np.ones((2, 2, 2, 2), dtype=int), synchronous=False, name="accept everything"
        ),
        "trivial_reject": Game(
            np.full((2, 2), 0.25), np.zeros((2, 2, 2, 2), dtype=int), name="reject everything"
        ),
    }


def fixtures():
    rep = base_rep()
    return {
        "base_rep": rep_to_json(rep),
        "target_table": table_to_json(correlation_from_rep(rep)),
        "shrinking_sequence": sequence_to_json(shrinking_sequence()),
        "constant_sequence": sequence_to_json(constant_sequence()),
        "mub_rep": rep_to_json(mub_rep()),
        "deterministic_rep": rep_to_json(deterministic_rep([0, 1, 1], 3, 2)),
    }


def write_corpus(root):
    for name, g in games().items():
        write_text_atomic(os.path.join(root, "games", f"{name}.json"), dumps(game_to_json(g)))
    for name, obj in fixtures().items():
        write_text_atomic(os.path.join(root, "fixtures", f"{name}.json"), dumps(obj))


if __name__ == "__main__":
    write_corpus(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "data"))
