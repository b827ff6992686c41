"""Exception taxonomy.

DomainError covers mathematically degenerate or invalid input (CLI exit 2).
InternalAssertion covers failed consistency checks (CLI exit 3): either a bug
or a falsified claim.
"""


class BlabError(Exception):
    pass


class DomainError(BlabError):
    pass


class InternalAssertion(BlabError):
    pass


class SharedTip(DomainError):
    pass


class CriticalCollapse(DomainError):
    pass


class DegenerateParameter(DomainError):
    pass


class CrossingLeaves(DomainError):
    pass


class HeightCollision(DomainError):
    pass


class NonConformingLength(DomainError):
    pass


class InvalidCriticalSet(DomainError):
    pass


class NonGenericHeights(DomainError):
    pass


class NumericalDegeneracy(DomainError):
    pass


class ContinuationStall(DomainError):
    pass


class MatchFailure(DomainError):
    pass


class ZeroLeading(DomainError):
    pass


class Undecided(DomainError):
    pass


class BelowCriticalHeight(DomainError):
    pass


class RayTraceFailure(DomainError):
    pass


class MultiVertex(DomainError):
    pass


class AmbiguousTracking(InternalAssertion):
    pass


class StructureViolation(InternalAssertion):
    pass
