"""Exception types raised across the pipeline."""


class ConeZetaError(Exception):
    """Base class; ``stage`` names the pipeline step that failed (set by the CLI)."""

    stage = None


class InputError(ConeZetaError):
    pass


# field
class ZeroDegree(InputError):
    pass


class NotIrreducible(InputError):
    pass


class NotTotallyReal(InputError):
    pass


# lattice
class NotAnIdeal(InputError):
    pass


class SingularBasis(InputError):
    pass


class ZeroElement(InputError):
    pass


class DiscriminantMismatch(InputError):
    pass


# cones
class NonSimplicial(ConeZetaError):
    pass


class RankDeficient(ConeZetaError):
    pass


class NotUnimodular(ConeZetaError):
    pass


class NotTotallyPositive(ConeZetaError):
    pass


# shintani
class NotQuadratic(ConeZetaError):
    pass


class UnitNotFound(ConeZetaError):
    pass


class NotSmooth(InputError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"cone {index} is not smooth")


class BadDeterminant(InputError):
    pass


class GeneratorOutsideClosure(InputError):
    pass


# summation / oracle
class IndexTooLight(InputError):
    pass


class NotMonogenic(InputError):
    pass


class BudgetExceeded(UserWarning):
    """Warning: a layer or prime cutoff was hit before the requested error was reached."""


class NoSymmetry(UserWarning):
    """Warning: symmetrize found no stabilizing permutation and returned its input."""
