"""Bound states of 3D Schroedinger operators with a delta interaction on a finite curve."""

from ._core import (
    BoundState,
    ConfigError,
    Curve,
    CurveKind,
    DomainError,
    FitError,
    QOperator,
    SolverError,
    bound_states,
    circle_symbol,
    green,
    green_dlambda,
    green_smooth,
    hiatus_sweep,
    q_apply_direct,
    q_apply_via_family,
    thresholds,
)

__version__ = "0.1.0"
