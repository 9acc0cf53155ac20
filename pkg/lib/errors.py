#!/usr/bin/env python3.11
"""
Exception hierarchy for the billiard orbit toolkit.

Every failure raised by the library derives from BilliardError so that the
command-line scripts can map them onto exit codes in one place.
"""

from typing import Optional


class BilliardError(RuntimeError):
    """Base class for all library failures"""


class DomainError(BilliardError, ValueError):
    """Arguments outside the domain where a formula or operation is defined"""


class NonUnitVector(DomainError):
    """A direction that must be a unit vector is not"""


class NonUnitTwist(DomainError):
    """A twist parameter z is not on the unit circle"""


class AmbientDimension(DomainError):
    """Operation only defined for a specific ambient dimension"""


class RunConfigError(DomainError):
    """Run configuration file is missing, malformed or inconsistent"""


class GrazingRay(BilliardError):
    """Ray is (numerically) tangent to the boundary at its start point"""

    def __init__(self, message: str, bounce_index: Optional[int] = None):
        if bounce_index is not None:
            message = f"{message} (bounce {bounce_index})"
        super().__init__(message)
        self.bounce_index = bounce_index


class NoConvergence(BilliardError):
    """An iterative solver exhausted its iteration budget"""

    def __init__(self, message: str, bounce_index: Optional[int] = None):
        if bounce_index is not None:
            message = f"{message} (bounce {bounce_index})"
        super().__init__(message)
        self.bounce_index = bounce_index


class OffSurface(BilliardError):
    """A point expected on the surface has a level-function residual above tolerance"""


class NotStrictlyConvex(BilliardError):
    """Shape operator is not positive definite at a queried point"""


class OutOfChart(BilliardError):
    """Chart coordinates outside the validity radius or retraction failed"""


class AdjacencyViolation(BilliardError):
    """Two cyclically adjacent bounce points coincide within tolerance"""

    def __init__(self, message: str, junction: Optional[int] = None, sample: Optional[int] = None):
        details = []
        if sample is not None:
            details.append(f"sample {sample}")
        if junction is not None:
            details.append(f"junction {junction}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.junction = junction
        self.sample = sample


class SeedCollapsed(AdjacencyViolation):
    """A solver iterate left the cyclic configuration space"""


class NotCritical(BilliardError):
    """Configuration is not a critical point of the length functional"""


class EigenFailure(BilliardError):
    """Dense eigensolver did not converge"""


class TransferSingular(BilliardError):
    """A monodromy transfer block is singular or badly conditioned"""


class InconclusiveJump(BilliardError):
    """An arc between Poincaré points is too short to sample"""


__all__ = [
    'BilliardError', 'DomainError', 'NonUnitVector', 'NonUnitTwist',
    'AmbientDimension', 'RunConfigError', 'GrazingRay', 'NoConvergence',
    'OffSurface', 'NotStrictlyConvex', 'OutOfChart', 'AdjacencyViolation',
    'SeedCollapsed', 'NotCritical', 'EigenFailure', 'TransferSingular',
    'InconclusiveJump',
]
