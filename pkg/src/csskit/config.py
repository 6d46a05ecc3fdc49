"""Global numerical tolerances.

All "is this zero" comparisons use ``ATOL`` unless an operation documents a
tighter override. ``SOLVER_TOL`` is the termination threshold of the
closest-separable-state loop; it can be overridden per call and, for the CLI,
through the ``CSSKIT_TOL`` environment variable.
"""

# Generic zero tolerance (eigenvalue signs, rank decisions, PSD slack).
ATOL = 1e-9

# Hermiticity / unitarity / reconstruction tolerance.
HERM_TOL = 1e-10

# Termination threshold on the trace deficit of the solver loop.
SOLVER_TOL = 1e-12

# Environment variable the CLI consults for the default tolerance.
TOL_ENV_VAR = "CSSKIT_TOL"
