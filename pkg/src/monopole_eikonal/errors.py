"""Exception hierarchy shared by all modules."""


class MonopoleEikonalError(Exception):
    """Base class for every error raised by the package."""


class SchemaError(MonopoleEikonalError):
    """Configuration document is malformed (bad syntax, wrong types, unknown keys)."""


class ValidationError(MonopoleEikonalError):
    """Configuration is well-formed but violates a physical invariant.

    ``path`` names the offending field, e.g. ``charges[1].pos``.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NumericalError(MonopoleEikonalError):
    """Base class for failures of a numerical method."""


class PoleError(NumericalError):
    pass


class BranchError(NumericalError):
    """Argument lies on a branch cut and no side was selected."""


class ConvergenceError(NumericalError):
    pass


class SingularPointError(NumericalError):
    """Evaluation point coincides with a charge position."""


class DegenerateError(NumericalError):
    pass


class FocalSingularity(NumericalError):
    pass


class ForwardSingularity(NumericalError):
    """Amplitude requested at zero momentum transfer."""


class CutCollision(NumericalError):
    """A quadrature contour would cross another branch cut."""


class RegulatorFailure(NumericalError):
    pass
