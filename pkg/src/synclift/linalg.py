"""Dense Hermitian linear algebra.

Eigendecomposition, functional calculus, state-weighted 2-norms and the
spectral projection onto ``[1/2, 1]`` that every rounding step builds on.
Matrices are ``complex128`` numpy arrays throughout.
"""
from dataclasses import dataclass

import numpy as np

from ._config import get_tol
from .exceptions import DimensionMismatch, NotPositiveContraction, NumericalFailure
from .validation import check_hermitian, check_rng, check_square

__all__ = [
    "EigenSystem",
    "StateVectorSpec",
    "eig_hermitian",
    "normalized_trace",
    "state_two_norm",
    "trace_two_norm",
    "is_positive_contraction",
    "spectral_projection_upper_half",
    "clamp_spectrum",
    "hermitian_part",
    "haar_unitary",
    "random_hermitian",
    "random_positive_contraction",
]


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class StateVectorSpec:
    """A state ``x -> trace(density @ x)`` on ``dim x dim`` matrices."""

    density: np.ndarray

    def __post_init__(self):
        rho = check_hermitian(self.density, name="density")
        tol = get_tol("trace")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > tol:
            raise ValueError(f"density must have unit trace, got {tr!r}")
        w = np.linalg.eigvalsh(rho)
        if w[0] < -get_tol("psd"):
            raise ValueError(f"density is not positive semidefinite (min eigenvalue {w[0]:.3e})")
        object.__setattr__(self, "density", rho)

    @property
    def dim(self):
        return self.density.shape[0]

    @classmethod
    def normalized_trace(cls, dim):
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def random_faithful(cls, dim, seed):
        """Full-rank density ``G G* / tr(G G*)`` for complex Gaussian ``G``."""
        rng = check_rng(seed)
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = g @ g.conj().T
        rho = hermitian_part(rho / np.trace(rho).real)
        return cls(rho)

    def __call__(self, x):
        return complex(np.trace(self.density @ np.asarray(x)))

    def is_faithful(self, tol=None):
        tol = get_tol("psd") if tol is None else tol
        return bool(np.linalg.eigvalsh(self.density)[0] > tol)


def hermitian_part(a):
    return 0.5 * (a + a.conj().T)


def eig_hermitian(a, tol=None):
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in ascending order (LAPACK ``heevd`` order);
    within a repeated eigenvalue the eigenvector basis is whatever LAPACK
    returns, which is deterministic for a fixed input.
    """
    a = check_hermitian(a, tol)
    try:
        w, v = np.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition did not converge: {exc}") from exc
    return EigenSystem(w, v)


def normalized_trace(a, tol=None):
    """``(1/dim) * trace(a)`` as a real number."""
    a = check_hermitian(a, tol)
    return float(np.trace(a).real) / a.shape[0]


def state_two_norm(x, state=None):
    """``sqrt(state(x* x))``; ``state=None`` means the normalized trace."""
    x = check_square(x, "x")
    if state is None:
        # tr(x* x)/n is the squared Frobenius norm over n
        return float(np.sqrt(np.sum(np.abs(x) ** 2) / x.shape[0]))
    if state.dim != x.shape[0]:
        raise DimensionMismatch(f"state has dim {state.dim}, operand has dim {x.shape[0]}")
    val = np.einsum("ij,kj,ki->", state.density, x.conj(), x).real
    return float(np.sqrt(max(val, 0.0)))


def trace_two_norm(x):
    return state_two_norm(x)


def is_positive_contraction(a, tol=None):
    a = check_hermitian(a)
    tol = get_tol("pos") if tol is None else tol
    w = np.linalg.eigvalsh(hermitian_part(a))
    return bool(w[0] >= -tol and w[-1] <= 1 + tol)


def spectral_projection_upper_half(a, tol=None, thresh=None):
    """Projection onto the span of eigenvectors with eigenvalue in ``[1/2, 1]``.

    Eigenvalues within ``thresh`` below 1/2 count as 1/2, so the closed
    endpoint survives floating-point noise.
    """
    tol = get_tol("pos") if tol is None else tol
    thresh = get_tol("thresh") if thresh is None else thresh
    es = eig_hermitian(a)
    w, v = es.eigenvalues, es.eigenvectors
    if w[0] < -tol or w[-1] > 1 + tol:
        raise NotPositiveContraction(
            f"spectrum [{w[0]:.3e}, {w[-1]:.3e}] is outside [0, 1] (tol {tol:.1e})"
        )
    vs = v[:, w >= 0.5 - thresh]
    return hermitian_part(vs @ vs.conj().T)


def clamp_spectrum(a, lo=0.0, hi=1.0):
    """Clamp the eigenvalues of a Hermitian matrix into ``[lo, hi]``."""
    w, v = np.linalg.eigh(hermitian_part(np.asarray(a, dtype=np.complex128)))
    return hermitian_part((v * np.clip(w, lo, hi)) @ v.conj().T)


def haar_unitary(dim, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix, phases fixed."""
    rng = check_rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(dim, rng, norm=1.0):
    """Random Hermitian matrix (GUE-like) rescaled to operator norm ``norm``."""
    rng = check_rng(rng)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = hermitian_part(g)
    scale = np.linalg.norm(h, 2)
    if scale == 0:
        return np.zeros((dim, dim), dtype=np.complex128)
    return h * (norm / scale)


def random_positive_contraction(dim, rng, spectrum=None):
    """``U diag(spectrum) U*`` with Haar ``U``; spectrum uniform on [0, 1] by default."""
    rng = check_rng(rng)
    if spectrum is None:
        spectrum = rng.uniform(0.0, 1.0, size=dim)
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.shape != (dim,):
        raise DimensionMismatch(f"spectrum must have length {dim}")
    u = haar_unitary(dim, rng)
    return hermitian_part((u * spectrum) @ u.conj().T)
