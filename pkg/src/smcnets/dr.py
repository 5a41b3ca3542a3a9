"""Switching-kernel selection: the compiled extension when built, else the
pure-Python twin.  Both expose run_switchings/count_configurations with
identical semantics; `KERNEL_IMPL` names the active one."""

from __future__ import annotations

try:
    from . import _drfast as _kernel  # type: ignore[attr-defined]
except ImportError:  # extension not built; the pure kernel is always present
    from . import _drpy as _kernel

from . import _drpy as pure_kernel

OK = 0
CYCLIC = 1
DISCONNECTED = 2

KERNEL_IMPL: str = _kernel.IMPL

DEFAULT_MAX_SWITCHINGS = 1 << 22


class SwitchingBudgetError(RuntimeError):
    pass


def run_switchings(n_vertices, fixed, groups, max_switchings: int | None = DEFAULT_MAX_SWITCHINGS,
                   connectivity: bool = True):
    """Check acyclicity (+connectedness unless disabled) of every switching
    configuration.  Refuses (raises SwitchingBudgetError) when the
    configuration count exceeds `max_switchings`; pass None to lift the guard.
    """
    total = _kernel.count_configurations(groups)
    if max_switchings is not None and total > max_switchings:
        raise SwitchingBudgetError(
            f"{total} switchings exceed the guard of {max_switchings}; "
            "raise max_switchings to force the check"
        )
    return _kernel.run_switchings(n_vertices, fixed, groups, connectivity)


def config_choices(groups, index):
    return _kernel.config_choices(groups, index)
