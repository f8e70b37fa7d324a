"""Exception hierarchy shared by all k3cert modules."""


class K3CertError(Exception):
    """Base class for every error raised by k3cert."""


class InvalidInputError(K3CertError, ValueError):
    pass


class DimensionError(InvalidInputError):
    """Classes from different lattices (or of the wrong length) were combined."""


class InvalidAmpleError(InvalidInputError):
    pass


class InvalidRankError(InvalidInputError):
    pass


class UnsupportedRankError(InvalidInputError):
    pass


class InvalidLatticeError(InvalidInputError):
    pass


class NotK3LatticeError(InvalidInputError):
    """The Gram matrix does not have hyperbolic signature (1, r-1, 0)."""


class HodgeIndexError(InvalidInputError):
    pass


class PreconditionError(K3CertError):
    pass
