"""Conjugate points, stability verdicts and cut-time bounds for Euler elasticae."""

from eulerconj.errors import (
    AmbiguousEndpointError,
    ConsistencyError,
    DomainError,
    IntegrationError,
    StratumError,
)
from eulerconj.elliptic import (
    JacobiTriple,
    complete_E,
    complete_K,
    find_k0,
    jacobi,
    jacobi_epsilon,
)
from eulerconj.strata import Covector, ReparamPoint, PendulumState, Stratum

__version__ = "0.1.0"

__all__ = [
    "AmbiguousEndpointError",
    "ConsistencyError",
    "Covector",
    "DomainError",
    "IntegrationError",
    "JacobiTriple",
    "PendulumState",
    "ReparamPoint",
    "Stratum",
    "StratumError",
    "complete_E",
    "complete_K",
    "find_k0",
    "jacobi",
    "jacobi_epsilon",
]
