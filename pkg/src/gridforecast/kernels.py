"""Backend selection for the hot grid kernels.

The compiled Cython module is used when it was built; otherwise the numpy
implementation is used. :func:`use_backend` switches explicitly, which the
tests and the benchmark rely on.
"""
from __future__ import annotations

import logging

from gridforecast import _pykernels

log = logging.getLogger(__name__)

try:
    from gridforecast import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels
BACKEND = "cython" if _ckernels is not None else "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> None:
    global _active, BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _active = _BACKENDS[name]
    BACKEND = name
    log.debug("grid kernels backend: %s", name)


def get_backend(name: str | None = None):
    return _active if name is None else _BACKENDS[name]


def box_sum(src, k_rows, k_cols):
    return _active.box_sum(src, k_rows, k_cols)


def greedy_sample(work, num_samples, half_rows, half_cols):
    return _active.greedy_sample(work, num_samples, half_rows, half_cols)


def draw_line(out, r0, c0, r1, c1):
    return _active.draw_line(out, r0, c0, r1, c1)
