"""Exception types shared across modules.

``InfeasibleError`` and its subclasses mark computations that hit a resource
cap or a containment guard; the CLI maps them to exit status 2.
"""


class InfeasibleError(RuntimeError):
    pass


class CapExceeded(InfeasibleError):
    pass


class GuardViolation(InfeasibleError):
    pass


class WorkCapExceeded(InfeasibleError):
    pass


class OracleUnknown(InfeasibleError):
    """An oracle could not decide a comparison the caller required."""
