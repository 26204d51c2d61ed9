"""Exception hierarchy shared by every module of the package."""


class NilMetricError(Exception):
    """Base class for all errors raised by nilmetric."""


class InvalidDimension(NilMetricError, ValueError):
    pass


class InvalidGenerator(NilMetricError, ValueError):
    pass


class DimensionError(NilMetricError, ValueError):
    pass


class NotInSubgroup(NilMetricError, ValueError):
    pass


class InvalidSpan(NilMetricError, ValueError):
    pass


class InvalidEmbedding(NilMetricError, ValueError):
    pass


class InvalidArgument(NilMetricError, ValueError):
    pass


class ResourceLimit(NilMetricError, RuntimeError):
    """A computation would exceed its configured element or size budget.

    ``partial`` carries whatever was completed before the limit was hit
    (for breadth-first search: the last fully explored radius).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
