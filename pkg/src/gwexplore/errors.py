"""Exception types shared across the package."""


class GwExploreError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GwExploreError):
    """A value, parameter set, or file failed a structural precondition."""


class ResourceLimitError(GwExploreError):
    """A sampler exceeded its node or event guard before terminating."""
