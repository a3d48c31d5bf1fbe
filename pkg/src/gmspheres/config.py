"""Default numerical tolerances.

Every function taking a ``tol`` argument defaults to one of these. The CLI
additionally honours the ``GM_SPHERES_TOL`` environment variable, which
overrides the per-check defaults of a verification suite.
"""
from __future__ import annotations

import os

#: single algebra operation (one product, one norm)
TOL_ALGEBRA = 1e-12
#: composite identities (several products, trig)
TOL_COMPOSITE = 1e-10
#: accepting points handed in from outside (files, command line)
TOL_EXTERNAL = 1e-8
#: below this sin(t) the suspension chart loses (p, w)
GAUGE_THRESHOLD = 1e-12

ENV_TOL = "GM_SPHERES_TOL"


def env_tolerance() -> float | None:
    """Tolerance override from the environment, or None if unset."""
    raw = os.environ.get(ENV_TOL)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = float(raw)
    except ValueError:
        value = float("nan")
    if not value > 0:
        raise ValueError(f"{ENV_TOL} must be positive, got {raw!r}")
    return value
