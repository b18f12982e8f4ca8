"""Input validation helpers, in the spirit of ``sklearn.utils.validation``.

All matrices are plain ``numpy`` arrays of dtype ``complex128``; these
helpers coerce and check them at module boundaries so the numerical code
can assume well-formed input.
"""
import numbers

import numpy as np

from ._config import get_tol
from .exceptions import (
    DimensionMismatch,
    NonHermitianInput,
    NotPositiveContraction,
)


def check_rng(seed):
    """Turn ``seed`` into a ``numpy.random.Generator`` (PCG64).

    ``None`` is rejected on purpose: every random draw in this package must
    be reproducible from an explicit integer seed.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, numbers.Integral) and not isinstance(seed, bool):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        return np.random.Generator(np.random.PCG64(int(seed)))
    raise TypeError(f"seed must be a non-negative int or a Generator, got {seed!r}")


def check_square(a, name="matrix"):
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(a, tol=None, name="matrix"):
    """Return ``a`` as a complex square array, raising if it is not self-adjoint."""
    arr = check_square(a, name)
    tol = get_tol("herm") if tol is None else tol
    defect = hermiticity_defect(arr)
    if defect > tol:
        raise NonHermitianInput(f"{name} is not Hermitian: max |a - a*| = {defect:.3e} > {tol:.1e}")
    return arr


def check_positive_contraction(a, tol=None, name="matrix"):
    arr = check_hermitian(a, name=name)
    tol = get_tol("pos") if tol is None else tol
    w = np.linalg.eigvalsh(arr)
    if w[0] < -tol or w[-1] > 1 + tol:
        raise NotPositiveContraction(
            f"{name} has spectrum [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1] (tol {tol:.1e})"
        )
    return arr


def check_same_dim(dim_a, dim_b, what="operands"):
    if dim_a != dim_b:
        raise DimensionMismatch(f"{what} have different dimensions: {dim_a} != {dim_b}")


def check_operator_stack(stack, ndim, name="stack"):
    """Coerce an array of square matrices with ``ndim`` total axes."""
    arr = np.asarray(stack, dtype=np.complex128)
    if arr.ndim != ndim or arr.shape[-1] != arr.shape[-2]:
        raise DimensionMismatch(
            f"{name} must have {ndim} axes ending in a square matrix, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr
