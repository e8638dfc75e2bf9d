"""Exception hierarchy shared by all nipreg modules."""


class NipregError(Exception):
    """Base class; the CLI maps subclasses onto exit codes."""

    exit_code = 4


class InputError(NipregError):
    pass


class NotAGroup(InputError):
    pass


class NotNormal(InputError):
    pass


class NotASubgroup(InputError):
    pass


class NotCosetUnion(InputError):
    pass


class MaskLengthMismatch(InputError):
    pass


class RankMismatch(InputError):
    pass


class BadRadius(InputError):
    pass


class EmptyBase(InputError):
    pass


class SizeMismatch(InputError):
    pass


class BadGenerator(InputError):
    pass


class MalformedWitness(InputError):
    pass


class NotApproxHom(InputError):
    """The map's multiplicative defect is not below the requested radius."""


class SizeLimit(NipregError):
    """Group order or an enumeration exceeded its configured cap."""

    exit_code = 3


class BudgetExceeded(NipregError):
    exit_code = 3

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class CorrectionFailed(NipregError):
    """No character lies within twice the radius of the approximate homomorphism."""

    exit_code = 2

    def __init__(self, message, taus, sup_dist):
        super().__init__(message)
        self.taus = taus
        self.sup_dist = sup_dist


class InternalCheckFailed(NipregError):
    """A guarantee that should hold by construction was violated (a bug)."""

    exit_code = 1
