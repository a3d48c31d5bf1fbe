"""Numerics for generalized Gromoll-Meyer spheres.

Modules: ``algebra`` (quaternions, octonions), ``powermaps`` (rho_n, degree,
clutching data), ``bundle`` (E_n and its actions), ``geometry`` (connection
metric, horizontal lifts), ``models`` (Milnor and Brieskorn spheres) and
``suites``/``cli`` (verification front end).
"""
from .errors import (  # noqa: F401
    ConvergenceError,
    DomainError,
    GMError,
    MembershipError,
    PreconditionError,
    RegularValueError,
)

__version__ = "0.1.0"
