"""Global numerical tolerances.

All tolerances live in one frozen record. Library functions read the active
record through :func:`get_config`; callers override it temporarily with
:func:`config_context` (same pattern as ``sklearn.config_context``).
"""

import dataclasses
import threading
from contextlib import contextmanager
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    projector: float = 1e-9
    commute: float = 1e-9
    degeneracy: float = 1e-8
    jacobi_offdiag: float = 1e-12
    jacobi_max_sweeps: int = 100
    trace: float = 1e-10
    unit: float = 1e-10
    weights: float = 1e-8
    # Born weights at or below this are treated as exact zeros when sampling.
    weight_floor: float = 1e-14
    branch_match: float = 1e-8
    zero_probability: float = 1e-12
    # [H, A] below this max-norm means A(t) == A exactly.
    conserved: float = 1e-12
    hbar: float = 1.0

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @classmethod
    def field_names(cls):
        return [f.name for f in dataclasses.fields(cls)]


_local = threading.local()
_global = Tolerances()


def get_config() -> Tolerances:
    return getattr(_local, "config", _global)


def set_config(config: Tolerances = None, **changes) -> None:
    """Replace the active tolerances for the current thread."""
    base = config if config is not None else get_config()
    _local.config = base.replace(**changes) if changes else base


@contextmanager
def config_context(**changes):
    old = get_config()
    set_config(old, **changes)
    try:
        yield get_config()
    finally:
        _local.config = old
