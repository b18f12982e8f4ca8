"""Rounding approximate PVMs to exact ones.

The building block is the spectral projection ``p(a) = 1_[1/2,1](a)`` of a
positive contraction, which satisfies ``||a - p(a)||_phi <= 2 ||a^2 - a||_phi``
for every state ``phi``.  A tuple ``a_1, ..., a_m`` is rounded
sequentially: ``p_1 = p(a_1)``, then every later element is compressed by
the complement of the projections found so far before it is rounded,

    a_k' = Q_k a_k Q_k,   Q_k = 1 - (p_1 + ... + p_{k-1}),   p_k = p(a_k'),

which makes the ``p_k`` mutually orthogonal by construction.

Sequences of such tuples (truncated elements of the bounded matrix
sequence algebra) are rounded index by index.  Limits along an
ultrafilter are not computable; tail statistics stand in for them.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._config import get_tol
from .exceptions import (
    DimensionMismatch,
    EmptySequence,
    PadLastNotProjection,
    RemainderTooNegative,
)
from .linalg import (
    clamp_spectrum,
    hermitian_part,
    spectral_projection_upper_half,
    state_two_norm,
)
from .player import PlayerRep, PositiveTuple, pvm_defects
from .validation import check_hermitian, check_operator_stack, check_positive_contraction

__all__ = [
    "RoundingReport",
    "ElementDefect",
    "DefectReport",
    "MatrixSequence",
    "ApproxRepSequence",
    "LiftedSequence",
    "TailStats",
    "spectral_round",
    "orthogonalize_tuple",
    "unitalize_tuple",
    "lift_sequence",
    "merge_reports",
    "seq_two_norm_tail",
]

MODES = ("pad_last", "report_only")

# tuples that are already PVMs to this accuracy are returned unchanged
FIXED_POINT_TOL = 1e-12


@dataclass(frozen=True)
class RoundingReport:
    distance: float
    bound: float

    @property
    def ratio(self):
        return self.distance / self.bound if self.bound > 0 else (0.0 if self.distance == 0 else math.inf)


@dataclass
class ElementDefect:
    """Per-element record of one rounding step.

    ``rounding_distance`` and ``certified_bound`` refer to the compressed
    element that was actually rounded; ``original_distance`` compares the
    emitted projection with the uncompressed input element.
    """

    projection_defect: float
    rounding_distance: float
    certified_bound: float
    original_distance: float
    padded: bool = False


@dataclass
class DefectReport:
    per_element: list = field(default_factory=list)
    sum_defect: float = 0.0
    max_orthogonality_defect: float = 0.0

    @property
    def certified(self):
        return all(e.rounding_distance <= e.certified_bound + 1e-10 for e in self.per_element)

    @property
    def max_certified_bound(self):
        return max((e.certified_bound for e in self.per_element), default=0.0)

    @property
    def max_projection_defect(self):
        return max((e.projection_defect for e in self.per_element), default=0.0)

    @property
    def total_original_distance(self):
        return sum(e.original_distance for e in self.per_element)

    def to_dict(self):
        return {
            "per_element": [asdict(e) for e in self.per_element],
            "sum_defect": self.sum_defect,
            "max_orthogonality_defect": self.max_orthogonality_defect,
        }


def spectral_round(a, state=None):
    """Round ``a`` to ``p(a)`` and report ``||a - p||_phi`` and ``2 ||a^2 - a||_phi``."""
    a = check_positive_contraction(a)
    if state is not None and state.dim != a.shape[0]:
        raise DimensionMismatch(f"state has dim {state.dim}, operand has dim {a.shape[0]}")
    p = spectral_projection_upper_half(a)
    distance = state_two_norm(a - p, state)
    bound = 2.0 * state_two_norm(a @ a - a, state)
    return p, RoundingReport(distance, bound)


def _as_elements(t):
    if isinstance(t, PositiveTuple):
        return t.elements
    return PositiveTuple(t).elements


def orthogonalize_tuple(t, state=None, mode="pad_last"):
    """Sequentially round a tuple of positive contractions into orthogonal projections.

    Parameters
    ----------
    t : PositiveTuple or array of shape (m, dim, dim)
    state : StateVectorSpec, optional
        State used for the reported 2-norms; defaults to the normalized trace.
    mode : {"pad_last", "report_only"}
        ``pad_last`` replaces the last projection with ``1 - (p_1 + ... + p_{m-1})``
        so the output is an exact PVM; ``report_only`` keeps all ``m`` rounded
        projections and reports how far their sum is from the identity.
        Either way, a tuple that is already a PVM within ``FIXED_POINT_TOL``
        is returned as is.

    Returns
    -------
    projections : ndarray of shape (m, dim, dim)
    report : DefectReport
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    elements = _as_elements(t)
    dim = elements.shape[-1]
    if state is not None and state.dim != dim:
        raise DimensionMismatch(f"state has dim {state.dim}, tuple has dim {dim}")
    eye = np.eye(dim, dtype=np.complex128)
    if max(pvm_defects(elements)) <= FIXED_POINT_TOL:
        return elements.copy(), _fixed_point_report(elements, state)
    found = np.zeros((dim, dim), dtype=np.complex128)
    out = np.empty_like(elements)
    report = DefectReport()
    for k, a in enumerate(elements):
        defect = state_two_norm(a @ a - a, state)
        if k == 0:
            compressed = a
        else:
            q = eye - found
            compressed = hermitian_part(q @ a @ q)
        p, step = spectral_round(compressed, state)
        out[k] = p
        found = found + p
        report.per_element.append(
            ElementDefect(
                projection_defect=defect,
                rounding_distance=step.distance,
                certified_bound=step.bound,
                original_distance=state_two_norm(p - a, state),
            )
        )
    if mode == "pad_last":
        last = hermitian_part(eye - out[:-1].sum(axis=0))
        if np.max(np.abs(last @ last - last)) > get_tol("proj"):
            raise PadLastNotProjection("complement of the rounded projections is not a projection")
        out[-1] = last
        report.per_element[-1].original_distance = state_two_norm(last - elements[-1], state)
        report.per_element[-1].padded = True
    _, orth, _ = pvm_defects(out)
    report.max_orthogonality_defect = orth
    report.sum_defect = state_two_norm(out.sum(axis=0) - eye, state)
    return out, report


def _fixed_point_report(elements, state):
    report = DefectReport()
    for a in elements:
        defect = state_two_norm(a @ a - a, state)
        report.per_element.append(ElementDefect(defect, 0.0, 2.0 * defect, 0.0))
    report.max_orthogonality_defect = pvm_defects(elements)[1]
    report.sum_defect = state_two_norm(elements.sum(axis=0) - np.eye(elements.shape[-1]), state)
    return report


def unitalize_tuple(t, return_loss=False):
    """Add the remainder ``1 - (a_1 + ... + a_m)`` to the last element.

    The patched last element is clamped back into ``[0, 1]``; the
    normalized-trace 2-norm of the resulting ``sum - 1`` is the clamping
    loss, returned when ``return_loss`` is true.
    """
    elements = _as_elements(t).copy()
    dim = elements.shape[-1]
    rem = hermitian_part(np.eye(dim) - elements.sum(axis=0))
    low = np.linalg.eigvalsh(rem)[0]
    if low < -0.5:
        raise RemainderTooNegative(
            f"remainder has eigenvalue {low:.3f} < -0.5; the tuple does not lift a unital representation"
        )
    elements[-1] = clamp_spectrum(elements[-1] + rem)
    loss = state_two_norm(elements.sum(axis=0) - np.eye(dim))
    out = PositiveTuple(elements)
    return (out, loss) if return_loss else out


@dataclass
class MatrixSequence:
    """Finite prefix ``(a_1, ..., a_N)`` of a bounded sequence of matrices of any sizes."""

    entries: list
    declared_sup_norm: float

    def __post_init__(self):
        self.entries = [check_hermitian(e, name=f"entry {n}") for n, e in enumerate(self.entries)]
        tol = get_tol("pos")
        for n, e in enumerate(self.entries):
            norm = float(np.linalg.norm(e, 2))
            if norm > self.declared_sup_norm + tol:
                raise ValueError(
                    f"entry {n} has operator norm {norm:.6g} > declared sup norm {self.declared_sup_norm}"
                )

    def __len__(self):
        return len(self.entries)


@dataclass
class ApproxRepSequence:
    """Per-index families of approximate PVMs, one tuple per question.

    ``indices[n]`` is an ``(X, A, d_n, d_n)`` array of positive contractions.
    """

    indices: list
    questions: int
    answers: int

    def __post_init__(self):
        checked = []
        for n, arr in enumerate(self.indices):
            arr = check_operator_stack(arr, 4, f"index {n}")
            if arr.shape[:2] != (self.questions, self.answers):
                raise DimensionMismatch(
                    f"index {n} has shape {arr.shape[:2]}, expected ({self.questions}, {self.answers})"
                )
            for x in range(self.questions):
                for a in range(self.answers):
                    check_positive_contraction(arr[x, a], name=f"index {n} element ({x}, {a})")
            checked.append(arr)
        self.indices = checked

    def __len__(self):
        return len(self.indices)

    def dims(self):
        return [arr.shape[-1] for arr in self.indices]

    @classmethod
    def from_perturbations(cls, rep, eps_schedule, seed):
        """Index ``n`` holds ``perturb_rep(rep, eps_schedule[n], seed + n)``."""
        from .player import perturb_rep

        return cls(
            [perturb_rep(rep, eps, seed + n) for n, eps in enumerate(eps_schedule)],
            rep.questions,
            rep.answers,
        )


@dataclass
class LiftedSequence:
    """Output of :func:`lift_sequence`; failed indices hold ``None`` and an entry in ``errors``."""

    reps: list
    reports: list
    errors: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.reps)


def _thread_cap():
    try:
        return max(1, int(os.environ.get("SYNC_LIFT_THREADS", "1")))
    except ValueError:
        return 1


def _lift_index(tuples, mode):
    state = None  # normalized trace at this index
    pvms = np.empty_like(tuples)
    reports = []
    for x, t in enumerate(tuples):
        pvms[x], rep = orthogonalize_tuple(t, state, mode)
        reports.append(rep)
    return PlayerRep(pvms), merge_reports(reports)


def merge_reports(reports):
    """Concatenate per-question reports of one index into a single report."""
    merged = DefectReport()
    for r in reports:
        merged.per_element.extend(r.per_element)
    merged.sum_defect = max(r.sum_defect for r in reports)
    merged.max_orthogonality_defect = max(r.max_orthogonality_defect for r in reports)
    return merged


def lift_sequence(s, mode="pad_last", n_jobs=None):
    """Round every index of ``s`` independently into a representation.

    Each index's report lists element defects question by question
    (``X * A`` records).  ``n_jobs`` defaults to ``$SYNC_LIFT_THREADS`` (1 if
    unset); results are always returned in index order.
    """
    n_jobs = _thread_cap() if n_jobs is None else max(1, int(n_jobs))

    def run(n):
        try:
            return _lift_index(s.indices[n], mode), None
        except Exception as exc:  # collected per index, reported to caller
            return (None, None), exc

    if n_jobs == 1 or len(s) < 2:
        results = [run(n) for n in range(len(s))]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, range(len(s))))
    out = LiftedSequence([], [])
    for n, ((rep, report), exc) in enumerate(results):
        out.reps.append(rep)
        out.reports.append(report)
        if exc is not None:
            out.errors[n] = exc
    return out


@dataclass(frozen=True)
class TailStats:
    per_index: list
    tail_sup: float
    tail_inf: float
    tail_length: int


def seq_two_norm_tail(s, tail_fraction=0.1):
    """Normalized-trace 2-norms ``||a_n||_2`` with sup/inf over the trailing window.

    The window is the last ``ceil(tail_fraction * N)`` indices.
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    entries = s.entries if isinstance(s, MatrixSequence) else list(s)
    if not entries:
        raise EmptySequence("sequence has no entries")
    norms = [state_two_norm(e) for e in entries]
    k = max(1, math.ceil(tail_fraction * len(norms) - 1e-9))
    tail = norms[-k:]
    return TailStats(norms, max(tail), min(tail), k)
