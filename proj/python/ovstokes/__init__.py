"""Stokes solver on overlapping spline patches."""

import os

# OpenBLAS kernel autodetection on some recent CPUs breaks UMFPACK; must be set before the library loads
os.environ.setdefault("OPENBLAS_CORETYPE", "Haswell")

from ._ovstokes import (  # noqa: E402
    ConfigurationError,
    Error,
    ParameterError,
    bspline_basis,
    condition_sweep,
    convergence,
    exact,
    gen_multi_patch,
    gen_two_patch,
    manufactured_names,
    solve,
)

__all__ = [
    "ConfigurationError",
    "Error",
    "ParameterError",
    "bspline_basis",
    "condition_sweep",
    "convergence",
    "exact",
    "gen_multi_patch",
    "gen_two_patch",
    "manufactured_names",
    "solve",
]
