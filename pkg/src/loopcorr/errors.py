"""Exception types shared across the package."""


class InfeasibleParameters(ValueError):
    """Requested graph/channel parameters cannot be satisfied."""


class RejectionBudgetExhausted(RuntimeError):
    """Rejection sampling failed to produce a simple graph within budget."""


class CapExceeded(RuntimeError):
    """An exact enumeration would exceed its configured work cap.

    Raised instead of silently approximating; raise the cap explicitly if
    the work is intended.
    """


class NoRootFound(RuntimeError):
    """A sign-change scan found no root on the search interval."""


class SingularInput(ValueError):
    """An input sits exactly on a singularity of the requested formula."""


class AlistError(ValueError):
    """Malformed alist data (bad header, degree mismatch, bad index)."""
