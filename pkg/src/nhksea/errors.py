"""Exception hierarchy shared by every module of the package."""


class NhkseaError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(NhkseaError, ValueError):
    """Model or run parameters violate a stated invariant."""


class DomainError(NhkseaError, ValueError):
    """An argument lies outside the domain of an operation (e.g. phi not in (0, pi))."""


class ExceptionalPointError(NhkseaError, ArithmeticError):
    """The Bogoliubov normalization M vanishes, so the u, v formulas are singular."""

    def __init__(self, phi, m_norm):
        self.phi = float(phi)
        self.m_norm = complex(m_norm)
        super().__init__(f"|M| = {abs(m_norm):.3e} below threshold at phi = {phi!r}")


class CoalescenceError(NhkseaError, ArithmeticError):
    """A momentum block is defective: both eigenvectors coalesce."""

    def __init__(self, phi):
        self.phi = float(phi)
        super().__init__(f"defective block (eigenvector coalescence) at phi = {phi!r}")


class ConventionError(NhkseaError, RuntimeError):
    """A quantity that must be real carries an imaginary residue, or a consistency check failed."""


class InconsistentCorrelatorsError(NhkseaError, ValueError):
    """Correlators do not assemble into a positive semidefinite density matrix."""


class NoZeroBracketedError(NhkseaError, ValueError):
    """The search interval does not contain a zero of the entanglement."""


class CapacityError(NhkseaError, ValueError):
    """Requested dense problem is too large for the exact-diagonalization oracle."""


class ConstructionMismatchError(NhkseaError, RuntimeError):
    """A dense construction disagrees with its reference beyond tolerance."""


class NumericalError(NhkseaError, ArithmeticError):
    """A quantity that is non-negative in exact arithmetic came out clearly negative."""
