"""Exception hierarchy.

Every error carries a short kebab-case ``code`` naming the violated contract
(``invalid-count``, ``degenerate-ray``, ...), so callers and the CLI can
dispatch on it without parsing messages.
"""


class TomokitError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class GridError(TomokitError, ValueError):
    """Bad grid arguments or a state/tomogram that does not fit its grid."""


class StateError(TomokitError, ValueError):
    """Invalid state parameters."""


class RayError(TomokitError, ValueError):
    """Degenerate ray, or a ray that cannot be obtained from a ray set."""


class SamplingError(TomokitError, ValueError):
    """Too few samples for a quadrature or finite-difference estimate."""


class NonPhysicalError(TomokitError):
    """A reconstruction violates a positivity invariant.

    The offending object and the smallest eigenvalue are attached so the
    caller can still inspect them.
    """

    def __init__(self, code, message="", *, min_eigenvalue=None, result=None):
        super().__init__(code, message)
        self.min_eigenvalue = min_eigenvalue
        self.result = result
