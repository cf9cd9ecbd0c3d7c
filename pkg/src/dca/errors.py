"""Exception types raised across the package."""


class DCAError(Exception):
    """Base class for all package errors."""


# combinatorics / connections

class EmptyInput(DCAError):
    pass


class NonManifold(DCAError):
    def __init__(self, face, simplices):
        super().__init__(f"face {face} lies in {len(simplices)} simplices")
        self.face = face
        self.simplices = simplices


class NotClosed(DCAError):
    pass


class NotColorable(DCAError):
    """No black/white coloring exists; ``witness`` is an odd closed thick path."""

    def __init__(self, witness):
        super().__init__(f"odd closed thick path of length {witness.length}")
        self.witness = witness


class DegeneratePath(DCAError):
    pass


class BoundaryVertex(DCAError):
    pass


class NotFlat(DCAError):
    """Canonical transport is path dependent; ``witness`` is a closed thick path
    with nontrivial holonomy."""

    def __init__(self, witness, message="connection is not flat"):
        super().__init__(message)
        self.witness = witness


class ZeroGaugeValue(DCAError):
    pass


# operators and solves

class MissingColoring(DCAError):
    pass


class DomainMismatch(DCAError):
    pass


class Inconsistent(DCAError):
    """Linear system has no solution.

    ``certificate`` maps original row indices to integer multipliers whose
    combination of the left-hand sides vanishes while the right-hand side
    does not.
    """

    def __init__(self, certificate, message="inconsistent linear system"):
        super().__init__(message)
        self.certificate = certificate


class NoAgreement(DCAError):
    pass


# lattices

class WindowTooSmall(DCAError):
    pass


class NoSuchPolynomial(DCAError):
    pass


class RankDeficient(DCAError):
    pass


class QuadratureNotConverged(DCAError):
    pass


class KernelWindowTooSmall(DCAError):
    pass


class DisconnectedSeed(DCAError):
    pass


class NotAPath(DCAError):
    pass


class InfeasibleAnchor(DCAError):
    pass


class TooLarge(DCAError):
    pass


class DependentDataSet(DCAError):
    """Chosen data points do not determine the function.

    ``certificate`` is a nonzero kernel element vanishing on every chosen point.
    """

    def __init__(self, certificate, message="data points are not independent"):
        super().__init__(message)
        self.certificate = certificate


# words

class TooShort(DCAError):
    pass


class LengthCap(DCAError):
    pass
