"""Exception hierarchy shared by all subsystems."""


class EqssError(Exception):
    """Base class for all errors raised by this package."""


class ImageNotInKernel(EqssError):
    """Subquotient input where the image does not land in the kernel."""


class GroupMismatch(EqssError):
    """Two objects built over different groups were combined."""


class ResolutionTooShort(EqssError):
    """A cohomology degree was requested beyond what the resolution certifies."""


class IrregularAction(EqssError):
    """A simplicial action fails regularity where regularity is required."""


class ResourceLimit(EqssError):
    """A construction would exceed the configured free-rank ceiling."""


class NotCovered(EqssError):
    """Iterated subdivision failed to make a chain small for the given cover."""


class DegreeBeyondSkeleton(EqssError):
    """A Borel cohomology degree beyond the certified skeletal range."""


class ScenarioParseError(EqssError):
    """Scenario file failed to parse; carries position information."""


class ScenarioValidationError(EqssError):
    """Scenario file parsed but violated a structural invariant."""
