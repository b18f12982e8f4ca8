"""Synchronous correlations from tracial states on finite-dimensional representations.

For a representation ``e(a|x)`` and a tracial state ``tau`` the table

    p(ab|xy) = tau(e(a|x) e(b|y))

is a synchronous quantum correlation.  Tables are stored as arrays indexed
``values[a, b, x, y]``.
"""
from dataclasses import dataclass, field

import numpy as np

from ._config import get_tol
from .exceptions import BlockLeakage, DimensionMismatch, InvalidRep, ShapeMismatch
from .lift import lift_sequence
from .player import TraceSpec, validate_player_rep

__all__ = [
    "CorrelationTable",
    "TableReport",
    "GramCheck",
    "ConvergenceReport",
    "correlation_from_rep",
    "moment_matrix",
    "check_table",
    "gram_psd_check",
    "table_distance",
    "pipeline_correlations",
    "METRICS",
]

METRICS = ("sup", "l1")


@dataclass
class CorrelationTable:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 4 or v.shape[0] != v.shape[1] or v.shape[2] != v.shape[3]:
            raise ShapeMismatch(f"table must have shape (A, A, X, X), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("table contains non-finite values")
        self.values = v

    @property
    def answers(self):
        return self.values.shape[0]

    @property
    def questions(self):
        return self.values.shape[2]

    def __getitem__(self, key):
        return self.values[key]


@dataclass
class TableReport:
    max_negativity: float
    max_normalization_defect: float
    max_synchronicity_defect: float
    symmetry_defect: float
    tol: float

    @property
    def valid(self):
        return max(
            self.max_negativity,
            self.max_normalization_defect,
            self.max_synchronicity_defect,
            self.symmetry_defect,
        ) <= self.tol


def _check_rep_and_trace(rep, tau):
    if tau is None:
        tau = TraceSpec.normalized(rep.dim)
    if tau.dim != rep.dim:
        raise DimensionMismatch(f"trace acts on dim {tau.dim}, representation has dim {rep.dim}")
    leak = tau.off_block_mass(rep.pvms)
    if leak > get_tol("herm"):
        raise BlockLeakage(f"representation leaks {leak:.3e} outside the trace's blocks")
    return tau


def moment_matrix(rep, tau=None):
    """Complex moments ``M[x, a, y, b] = tau(e(a|x) e(b|y))``."""
    tau = _check_rep_and_trace(rep, tau)
    X, A = rep.questions, rep.answers
    moments = np.zeros((X, A, X, A), dtype=np.complex128)
    for s, n, w in zip(tau.slices(), tau.block_dims, tau.weights):
        block = rep.pvms[:, :, s, s]
        # trace(E F) = sum_ij E_ij F_ji
        moments += (w / n) * np.einsum("xaij,ybji->xayb", block, block)
    return moments


def correlation_from_rep(rep, tau=None, tol=None):
    """Table ``p(ab|xy) = tau(e(a|x) e(b|y))``; ``tau`` defaults to the normalized trace."""
    tol = get_tol("proj") if tol is None else tol
    report = validate_player_rep(rep, tol)
    if not report.valid:
        raise InvalidRep(f"representation is not a family of PVMs: {report.summary()}")
    moments = moment_matrix(rep, tau)
    imag = float(np.max(np.abs(moments.imag)))
    if imag > get_tol("imag"):
        raise InvalidRep(f"moments have imaginary part {imag:.3e}")
    return CorrelationTable(np.transpose(moments.real, (1, 3, 0, 2)))


def check_table(t, tol=None):
    tol = get_tol("corr") if tol is None else tol
    v = t.values
    A = t.answers
    neg = float(max(0.0, -v.min()))
    norm = float(np.max(np.abs(v.sum(axis=(0, 1)) - 1.0)))
    diag = np.einsum("abxx->abx", v)
    off = ~np.eye(A, dtype=bool)
    sync = float(np.max(np.abs(diag[off]))) if A > 1 else 0.0
    sym = float(np.max(np.abs(v - np.transpose(v, (1, 0, 3, 2)))))
    return TableReport(neg, norm, sync, sym, tol)


@dataclass(frozen=True)
class GramCheck:
    min_eigenvalue: float
    psd: bool
    matrix: np.ndarray


def gram_psd_check(rep, tau=None, tol=None):
    """Minimum eigenvalue of the ``(A*X) x (A*X)`` moment matrix.

    The moment matrix is the Gram matrix of the projections under the
    inner product ``<f, e> = tau(e* f)``, so it must be positive semidefinite.
    """
    tol = get_tol("psd") if tol is None else tol
    X, A = rep.questions, rep.answers
    m = moment_matrix(rep, tau).reshape(X * A, X * A)
    m = 0.5 * (m + m.conj().T)
    lo = float(np.linalg.eigvalsh(m)[0])
    return GramCheck(lo, lo >= -tol, m)


def table_distance(p, q, metric="sup"):
    if p.values.shape != q.values.shape:
        raise ShapeMismatch(f"table shapes differ: {p.values.shape} vs {q.values.shape}")
    diff = np.abs(p.values - q.values)
    if metric == "sup":
        return float(diff.max())
    if metric == "l1":
        return float(diff.sum())
    raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")


@dataclass
class ConvergenceReport:
    """Per-index distance of lifted correlations to a target table.

    ``correlation_bound[n]`` is twice the largest ``||p_k - a_k||_2`` at
    index ``n``: by Cauchy-Schwarz in the trace 2-norm it bounds how far the
    lifted table can be from the table of the unrounded contractions.
    """

    per_index_distance: list
    final_distance: float
    metric_name: str
    dims: list = field(default_factory=list)
    max_defect: list = field(default_factory=list)
    certified_bound: list = field(default_factory=list)
    correlation_bound: list = field(default_factory=list)
    status: list = field(default_factory=list)

    def rows(self):
        for n, d in enumerate(self.per_index_distance):
            yield {
                "index": n,
                "dim": self.dims[n],
                "max_defect": self.max_defect[n],
                "certified_bound": self.certified_bound[n],
                "distance": d,
                "status": self.status[n],
            }


def pipeline_correlations(s, target, metric="sup", mode="pad_last", n_jobs=None):
    """Lift ``s`` index by index, correlate under ``tr_n`` and compare with ``target``.

    Failed indices get distance ``nan`` and a status message; they do not
    abort the run.
    """
    if (target.questions, target.answers) != (s.questions, s.answers):
        raise ShapeMismatch(
            f"target is (X={target.questions}, A={target.answers}), "
            f"sequence is (X={s.questions}, A={s.answers})"
        )
    lifted = lift_sequence(s, mode, n_jobs=n_jobs)
    report = ConvergenceReport([], float("nan"), metric)
    for n, (rep, dr) in enumerate(zip(lifted.reps, lifted.reports)):
        report.dims.append(s.indices[n].shape[-1])
        if n in lifted.errors:
            report.per_index_distance.append(float("nan"))
            report.max_defect.append(float("nan"))
            report.certified_bound.append(float("nan"))
            report.correlation_bound.append(float("nan"))
            report.status.append(f"error: {lifted.errors[n]}")
            continue
        try:
            table = correlation_from_rep(rep, TraceSpec.normalized(rep.dim))
            dist = table_distance(table, target, metric)
        except Exception as exc:  # recorded per index
            dist, status = float("nan"), f"error: {exc}"
        else:
            status = "ok"
        report.per_index_distance.append(dist)
        report.max_defect.append(dr.max_projection_defect)
        report.certified_bound.append(dr.max_certified_bound)
        report.correlation_bound.append(2.0 * max(e.original_distance for e in dr.per_element))
        report.status.append(status)
    ok = [d for d, st in zip(report.per_index_distance, report.status) if st == "ok"]
    if ok:
        report.final_distance = ok[-1] if report.status[-1] == "ok" else float("nan")
    return report
