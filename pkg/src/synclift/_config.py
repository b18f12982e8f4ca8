"""Global numerical tolerances, with a context manager for temporary overrides.

Mirrors the ``sklearn.set_config`` / ``config_context`` pattern: every
function that takes a ``tol`` keyword falls back to the value stored here.
"""
import threading
from contextlib import contextmanager

_DEFAULTS = {
    "herm": 1e-10,
    "eig": 1e-10,
    "proj": 1e-10,
    "pos": 1e-9,
    "thresh": 1e-12,
    "trace": 1e-10,
    "psd": 1e-9,
    "corr": 1e-10,
    "imag": 1e-8,
}

_local = threading.local()


def _store():
    if not hasattr(_local, "tol"):
        _local.tol = dict(_DEFAULTS)
    return _local.tol


def get_tolerances():
    """Return a copy of the active tolerance table."""
    return dict(_store())


def get_tol(name):
    return _store()[name]


def set_tolerances(**overrides):
    store = _store()
    for name, value in overrides.items():
        if name not in _DEFAULTS:
            raise KeyError(f"unknown tolerance {name!r}; known: {sorted(_DEFAULTS)}")
        if not value > 0:
            raise ValueError(f"tolerance {name!r} must be positive, got {value!r}")
        store[name] = float(value)


@contextmanager
def tolerance_context(**overrides):
    """Temporarily override tolerances, e.g. ``tolerance_context(proj=1e-8)``."""
    saved = get_tolerances()
    set_tolerances(**overrides)
    try:
        yield
    finally:
        _store().clear()
        _store().update(saved)


def tolerance_names():
    return tuple(_DEFAULTS)
