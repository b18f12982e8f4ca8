"""Finite-dimensional representations of the player algebra.

A representation assigns to every question ``x`` a projection-valued
measure ``e(.|x)`` on a common Hilbert space.  Representations are stored
as a single ``(X, A, dim, dim)`` complex array; ``rep.pvms[x, a]`` is
``e(a|x)``.
"""
from dataclasses import dataclass, field

import numpy as np

from ._config import get_tol
from .exceptions import (
    AnswerCountExceedsDim,
    BlockLeakage,
    DimensionMismatch,
    InvalidFunctionRange,
    NonHermitianInput,
)
from .linalg import clamp_spectrum, haar_unitary, hermitian_part, random_hermitian
from .validation import check_hermitian, check_operator_stack, check_positive_contraction, check_rng

__all__ = [
    "PlayerRep",
    "PositiveTuple",
    "TraceSpec",
    "ValidationReport",
    "pvm_defects",
    "validate_player_rep",
    "deterministic_rep",
    "random_rep",
    "perturb_rep",
    "apply_trace",
    "block_direct_sum",
]


def _max_opnorm(stack):
    if stack.shape[0] == 0:
        return 0.0
    return float(np.linalg.svd(stack, compute_uv=False).max())


def pvm_defects(projections):
    """Projection, orthogonality and sum-to-identity defects of one tuple.

    All defects are operator norms: ``max_a ||P_a^2 - P_a||`` (also covering
    ``||P_a - P_a*||``), ``max_{a != b} ||P_a P_b||`` and ``||sum_a P_a - I||``.
    """
    p = np.asarray(projections)
    n_out, dim = p.shape[0], p.shape[-1]
    adj = np.conj(np.swapaxes(p, -1, -2))
    proj = max(_max_opnorm(p @ p - p), _max_opnorm(p - adj))
    ia, ib = np.triu_indices(n_out, k=1)
    orth = _max_opnorm(p[ia] @ p[ib])
    total = _max_opnorm((p.sum(axis=0) - np.eye(dim))[None])
    return proj, orth, total


@dataclass
class ValidationReport:
    """Per-question PVM defects; ``valid`` iff every defect is within ``tol``."""

    tol: float
    projection_defect: list = field(default_factory=list)
    orthogonality_defect: list = field(default_factory=list)
    sum_defect: list = field(default_factory=list)

    @property
    def max_projection_defect(self):
        return max(self.projection_defect, default=0.0)

    @property
    def max_orthogonality_defect(self):
        return max(self.orthogonality_defect, default=0.0)

    @property
    def max_sum_defect(self):
        return max(self.sum_defect, default=0.0)

    @property
    def max_defect(self):
        return max(self.max_projection_defect, self.max_orthogonality_defect, self.max_sum_defect)

    @property
    def valid(self):
        return self.max_defect <= self.tol

    def summary(self):
        return (
            f"projection defect {self.max_projection_defect:.3e}, "
            f"orthogonality defect {self.max_orthogonality_defect:.3e}, "
            f"sum defect {self.max_sum_defect:.3e} (tol {self.tol:.1e})"
        )

    def to_dict(self):
        return {
            "tol": self.tol,
            "valid": self.valid,
            "projection_defect": list(self.projection_defect),
            "orthogonality_defect": list(self.orthogonality_defect),
            "sum_defect": list(self.sum_defect),
        }


@dataclass
class PlayerRep:
    """One PVM with ``answers`` outcomes per question, all on ``dim``."""

    pvms: np.ndarray

    def __post_init__(self):
        self.pvms = check_operator_stack(self.pvms, 4, "pvms")
        if min(self.pvms.shape[:2]) < 1:
            raise DimensionMismatch("a representation needs at least one question and one answer")

    @property
    def questions(self):
        return self.pvms.shape[0]

    @property
    def answers(self):
        return self.pvms.shape[1]

    @property
    def dim(self):
        return self.pvms.shape[2]

    def __getitem__(self, key):
        # rep[a, x] -> e(a|x)
        a, x = key
        return self.pvms[x, a]

    def validate(self, tol=None):
        return validate_player_rep(self, tol)


@dataclass
class PositiveTuple:
    """A tuple of positive contractions on a common space (an approximate PVM)."""

    elements: np.ndarray

    def __post_init__(self):
        self.elements = check_operator_stack(self.elements, 3, "elements")
        for k, el in enumerate(self.elements):
            check_positive_contraction(el, name=f"element {k}")

    @property
    def dim(self):
        return self.elements.shape[-1]

    def __len__(self):
        return self.elements.shape[0]


@dataclass
class TraceSpec:
    """Tracial state ``sum_i w_i tr_{n_i}`` on the block algebra ``M_{n_1} + ... + M_{n_k}``."""

    block_dims: tuple
    weights: tuple

    def __post_init__(self):
        self.block_dims = tuple(int(n) for n in self.block_dims)
        self.weights = tuple(float(w) for w in self.weights)
        if not self.block_dims or len(self.block_dims) != len(self.weights):
            raise ValueError("block_dims and weights must be non-empty and of equal length")
        if any(n < 1 for n in self.block_dims):
            raise ValueError(f"block dimensions must be positive, got {self.block_dims}")
        if any(w < 0 or not np.isfinite(w) for w in self.weights):
            raise ValueError(f"weights must be finite and non-negative, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > get_tol("trace"):
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)!r}")

    @classmethod
    def normalized(cls, dim):
        return cls((dim,), (1.0,))

    @property
    def dim(self):
        return sum(self.block_dims)

    def slices(self):
        start = 0
        for n in self.block_dims:
            yield slice(start, start + n)
            start += n

    def off_block_mass(self, a):
        """Largest entry magnitude outside the diagonal blocks."""
        mask = np.ones(a.shape[-2:], dtype=bool)
        for s in self.slices():
            mask[s, s] = False
        return float(np.max(np.abs(a[..., mask]))) if mask.any() else 0.0

    def evaluate(self, a):
        """Complex value of the trace on ``a`` (no leakage or reality checks)."""
        total = 0.0 + 0.0j
        for s, n, w in zip(self.slices(), self.block_dims, self.weights):
            total += w * np.trace(a[s, s]) / n
        return complex(total)


def validate_player_rep(rep, tol=None):
    tol = get_tol("proj") if tol is None else tol
    report = ValidationReport(tol=tol)
    for pvm in rep.pvms:
        proj, orth, total = pvm_defects(pvm)
        report.projection_defect.append(proj)
        report.orthogonality_defect.append(orth)
        report.sum_defect.append(total)
    return report


def deterministic_rep(f, questions, answers):
    """One-dimensional representation of the classical strategy ``x -> f(x)``.

    ``f`` may be a callable or a sequence indexed by question.
    """
    values = [f(x) if callable(f) else f[x] for x in range(questions)]
    pvms = np.zeros((questions, answers, 1, 1), dtype=np.complex128)
    for x, a in enumerate(values):
        if not (isinstance(a, (int, np.integer)) and 0 <= a < answers):
            raise InvalidFunctionRange(f"f({x}) = {a!r} is not an answer in 0..{answers - 1}")
        pvms[x, a, 0, 0] = 1.0
    return PlayerRep(pvms)


def round_robin_cells(dim, answers):
    """Diagonal 0/1 masks; basis slot ``i`` goes to answer cell ``i mod answers``."""
    cells = np.zeros((answers, dim))
    cells[np.arange(dim) % answers, np.arange(dim)] = 1.0
    return cells


def random_rep(dim, questions, answers, seed, allow_zero=False):
    """PVMs ``U_x D_a U_x*`` with Haar unitaries ``U_x`` and round-robin cells ``D_a``."""
    if dim < 1 or questions < 1 or answers < 1:
        raise ValueError("dim, questions and answers must all be positive")
    if answers > dim and not allow_zero:
        raise AnswerCountExceedsDim(
            f"{answers} answers on dimension {dim} would force zero projections; pass allow_zero=True"
        )
    rng = check_rng(seed)
    cells = round_robin_cells(dim, answers)
    pvms = np.empty((questions, answers, dim, dim), dtype=np.complex128)
    for x in range(questions):
        u = haar_unitary(dim, rng)
        for a in range(answers):
            pvms[x, a] = hermitian_part((u * cells[a]) @ u.conj().T)
    return PlayerRep(pvms)


def perturb_rep(rep, eps, seed):
    """Replace every projection ``P`` by ``clamp(P + eps * H)``.

    ``H`` is a fresh random Hermitian of unit operator norm per projection
    and ``clamp`` clips the spectrum to ``[0, 1]``.  Returns an
    ``(X, A, dim, dim)`` array of positive contractions, one tuple per
    question.
    """
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"eps must lie in [0, 0.5], got {eps!r}")
    if eps == 0.0:
        return rep.pvms.copy()
    rng = check_rng(seed)
    out = np.empty_like(rep.pvms)
    for x in range(rep.questions):
        for a in range(rep.answers):
            h = random_hermitian(rep.dim, rng)
            out[x, a] = clamp_spectrum(rep.pvms[x, a] + eps * h)
    return out


def apply_trace(tau, a, tol=None):
    """Evaluate the tracial state ``tau`` on a block-diagonal Hermitian ``a``."""
    tol = get_tol("herm") if tol is None else tol
    a = check_hermitian(a, tol)
    if a.shape[0] != tau.dim:
        raise DimensionMismatch(f"operand has dim {a.shape[0]}, trace expects {tau.dim}")
    leak = tau.off_block_mass(a)
    if leak > tol:
        raise BlockLeakage(f"off-block mass {leak:.3e} exceeds {tol:.1e}")
    val = tau.evaluate(a)
    if abs(val.imag) > tol:
        raise NonHermitianInput(f"trace has imaginary part {val.imag:.3e}")
    return float(val.real)


def block_direct_sum(reps):
    """Direct sum of representations with matching (questions, answers)."""
    shapes = {r.pvms.shape[:2] for r in reps}
    if len(shapes) != 1:
        raise DimensionMismatch(f"representations disagree on (questions, answers): {shapes}")
    X, A = shapes.pop()
    dim = sum(r.dim for r in reps)
    pvms = np.zeros((X, A, dim, dim), dtype=np.complex128)
    start = 0
    for r in reps:
        s = slice(start, start + r.dim)
        pvms[:, :, s, s] = r.pvms
        start += r.dim
    return PlayerRep(pvms)
