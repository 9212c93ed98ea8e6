"""Kernel backend selection.

The compiled extension ``spinq._kernels`` is used when it imports; otherwise the
numpy/pure-Python versions in ``spinq._fallback`` take over. ``use_backend``
switches explicitly (tests and benchmarks use it to compare the two).
"""
from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _fallback


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def backend_name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    """Select ``"compiled"`` or ``"python"``; returns the previous backend name."""
    global _active
    prev = backend_name()
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _compiled
    elif name == "python":
        _active = _fallback
    else:
        raise ValueError(f"unknown backend {name!r}")
    return prev


def partition_sum(*args):
    return _active.partition_sum(*args)


def phi_counts(*args):
    return _active.phi_counts(*args)


def fork_chain(*args):
    return _active.fork_chain(*args)
