"""Typed error taxonomy shared by every layer."""


class GabtopError(Exception):
    """Base for all typed computation errors."""


class HandleMismatch(GabtopError):
    pass


class EmptyGenerators(GabtopError):
    pass


class NotAMorphism(GabtopError):
    pass


class CompositionMismatch(GabtopError):
    pass


class UnsupportedPresentation(GabtopError):
    pass


class MalformedTower(GabtopError):
    pass


class MalformedChain(GabtopError):
    pass


class BudgetExceeded(GabtopError):
    pass


class PartialClosure(GabtopError):
    def __init__(self, msg, result=None, lost=None):
        super().__init__(msg)
        self.result = result
        self.lost = lost


class NotDirected(GabtopError):
    pass


class ChainRequired(GabtopError):
    pass


class BadCertificate(GabtopError):
    pass


class DepthMismatch(GabtopError):
    pass


class NotInIdeal(GabtopError):
    pass


class NotZeroConvergent(GabtopError):
    pass


class TorsionObstruction(GabtopError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class FaithfulOnly(GabtopError):
    pass


class FiniteOnly(GabtopError):
    pass


class InfiniteDual(GabtopError):
    pass


class TwoSidedRequired(GabtopError):
    pass


class NotFlat(GabtopError):
    pass
