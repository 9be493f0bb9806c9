"""Domain errors. Class names are the stable identifiers surfaced by the CLI
and the service, so keep them spelled exactly as raised."""


class FermionicError(Exception):
    """Base class for every error raised by this package."""


class NonHermitian(FermionicError):
    pass


class NoConvergence(FermionicError):
    pass


class NotPSD(FermionicError):
    pass


class DimensionMismatch(FermionicError):
    pass


class DenseCapExceeded(FermionicError):
    """A dense kernel was asked for a matrix larger than the desk-scale cap."""


class ModeOutOfRange(FermionicError):
    pass


class ParityViolation(FermionicError):
    """An operator has weight connecting the even and odd Fock sectors."""


class TraceTooLarge(FermionicError):
    pass


class NotNormalized(FermionicError):
    pass


class InvalidState(FermionicError):
    pass


class EmptyComplement(FermionicError):
    """All modes were traced out but a state (not a scalar) was requested."""


class MarginalMismatch(FermionicError):
    pass


class IndefiniteParityKraus(FermionicError):
    """A Kraus matrix mixes the parity-preserving and parity-flipping blocks."""


class CompletenessViolation(FermionicError):
    pass


class NotDeterministic(FermionicError):
    pass


class NotAnEffect(FermionicError):
    pass


class EmptyTypicalSet(FermionicError):
    """No eigen-sequence is typical at the requested (N, epsilon)."""


class RateNotBelowEntropy(FermionicError):
    pass


class DenseUnavailable(FermionicError):
    pass
