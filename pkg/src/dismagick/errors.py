class DismagickError(Exception):
    """Base class for errors raised by this package."""


class NonCliffordGate(DismagickError):
    pass


class SiteOutOfRange(DismagickError, IndexError):
    pass


class BondOutOfRange(DismagickError, IndexError):
    pass


class TooLarge(DismagickError, ValueError):
    """Dense conversion requested for a system beyond the dense limit."""


class TooManyQubits(DismagickError, ValueError):
    """Exact Pauli enumeration requested beyond the hard qubit guard."""


class NotNormalized(DismagickError, ValueError):
    pass
