"""scikit-learn style wrappers around the rounding, correlation and game code.

The estimators hold only hyperparameters in ``__init__`` so that
``get_params``/``set_params``/``clone`` work; everything learned ends in an
underscore.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .correlations import CorrelationTable, correlation_from_rep
from .games import Game, game_value, seesaw_optimize
from .lift import MODES, orthogonalize_tuple
from .player import PlayerRep
from .validation import check_operator_stack

__all__ = ["SpectralRounder", "CorrelationExtractor", "SeesawOptimizer"]


def _as_tuple_batch(X):
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim == 3:
        arr = arr[None]
    return check_operator_stack(arr, 4, "X")


class SpectralRounder(TransformerMixin, BaseEstimator):
    """Round batches of approximate PVMs to exact PVMs.

    ``X`` has shape ``(n_tuples, m, dim, dim)`` (a single ``(m, dim, dim)``
    tuple is also accepted); ``transform`` returns an array of the same
    shape holding projections.

    Parameters
    ----------
    mode : {"pad_last", "report_only"}, default="pad_last"
    state : StateVectorSpec or None, default=None
        State for the reported 2-norms; ``None`` is the normalized trace.

    Attributes
    ----------
    projections_ : ndarray
        Rounded version of the array passed to ``fit``.
    reports_ : list of DefectReport
        One report per tuple seen by ``fit``.
    """

    def __init__(self, mode="pad_last", state=None):
        self.mode = mode
        self.state = state

    def _round(self, X):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        batch = _as_tuple_batch(X)
        out = np.empty_like(batch)
        reports = []
        for i, t in enumerate(batch):
            out[i], rep = orthogonalize_tuple(t, self.state, self.mode)
            reports.append(rep)
        return out, reports

    def fit(self, X, y=None):
        self.projections_, self.reports_ = self._round(X)
        self.n_outcomes_, self.dim_ = self.projections_.shape[1], self.projections_.shape[-1]
        return self

    def transform(self, X):
        check_is_fitted(self, "reports_")
        out, _ = self._round(X)
        if out.shape[1:] != (self.n_outcomes_, self.dim_, self.dim_):
            raise ValueError(
                f"X has tuples of shape {out.shape[1:]}, fitted on {(self.n_outcomes_, self.dim_, self.dim_)}"
            )
        return out

    def fit_transform(self, X, y=None):
        return self.fit(X).projections_


class CorrelationExtractor(TransformerMixin, BaseEstimator):
    """Map representations ``(X, A, dim, dim)`` to correlation tables ``(A, A, X, X)``."""

    def __init__(self, trace=None):
        self.trace = trace

    def fit(self, X, y=None):
        rep = X if isinstance(X, PlayerRep) else PlayerRep(X)
        self.questions_, self.answers_ = rep.questions, rep.answers
        return self

    def transform(self, X):
        check_is_fitted(self, "questions_")
        rep = X if isinstance(X, PlayerRep) else PlayerRep(X)
        return correlation_from_rep(rep, self.trace).values


class SeesawOptimizer(BaseEstimator):
    """Local search for good ``dim``-dimensional synchronous strategies of a game.

    Parameters
    ----------
    dim : int, default=2
    iters : int, default=200
    step : float, default=0.1
    random_state : int, default=0

    Attributes
    ----------
    rep_ : PlayerRep
        Best representation found.
    value_ : float
    trajectory_ : list of (iteration, value)
    n_rounding_ : int
        Number of tuple roundings performed.
    """

    def __init__(self, dim=2, iters=200, step=0.1, random_state=0):
        self.dim = dim
        self.iters = iters
        self.step = step
        self.random_state = random_state

    def fit(self, game, y=None):
        if not isinstance(game, Game):
            raise TypeError(f"expected a Game, got {type(game).__name__}")
        res = seesaw_optimize(game, self.dim, self.iters, self.random_state, step=self.step)
        self.rep_, self.value_ = res.rep, res.value
        self.trajectory_, self.n_rounding_ = res.trajectory, res.rounding_invocations
        return self

    def predict(self, game=None):
        """Correlation table of the best strategy."""
        check_is_fitted(self, "rep_")
        return correlation_from_rep(self.rep_)

    def score(self, game, y=None):
        return game_value(game, CorrelationTable(self.predict().values))
