"""Exception hierarchy.

Errors that carry a witness (a set pair, a point, a hyperpoint) expose it as an
attribute so callers and tests can inspect exactly what failed.
"""


class TopomataError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------- topology

class TopologyError(TopomataError):
    pass


class MissingEmptyOrFull(TopologyError):
    pass


class NotClosedUnderUnion(TopologyError):
    def __init__(self, a: int, b: int):
        self.witness = (a, b)
        super().__init__(f"union of opens {a:#x} and {b:#x} is not open")


class NotClosedUnderIntersection(TopologyError):
    def __init__(self, a: int, b: int):
        self.witness = (a, b)
        super().__init__(f"intersection of opens {a:#x} and {b:#x} is not open")


class BasisNotCovering(TopologyError):
    pass


class NotABasis(TopologyError):
    def __init__(self, a: int, b: int):
        self.witness = (a, b)
        super().__init__(
            f"basis sets {a:#x} and {b:#x} intersect outside the union closure"
        )


class CapExceeded(TopologyError):
    pass


# --------------------------------------------------------------- operators

class OperatorError(TopomataError):
    pass


class SizeMismatch(OperatorError):
    pass


class NotClosed(OperatorError):
    def __init__(self, point: int, image):
        self.witness = point
        super().__init__(f"point {point} maps to {image} outside the subset")


class EmptyImage(OperatorError):
    def __init__(self, hyper_mask: int, msg: str = ""):
        self.witness = hyper_mask
        super().__init__(msg or f"hyperpoint {hyper_mask:#x} has empty lifted image")


class ImageOutsideCarrier(OperatorError):
    def __init__(self, hyper_mask: int, image_mask: int):
        self.witness = (hyper_mask, image_mask)
        super().__init__(
            f"lifted image {image_mask:#x} of hyperpoint {hyper_mask:#x} "
            "is not a carrier point"
        )


class NotInvertible(OperatorError):
    pass


class InverseNotContinuous(OperatorError):
    pass


# ----------------------------------------------------------------- machine

class MachineError(TopomataError):
    pass


class UnknownSymbol(MachineError):
    pass


class InvalidMachine(MachineError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class BudgetExceeded(MachineError):
    pass


class EndmarkerMode(MachineError):
    """Operation applied to a machine with the wrong endmarker configuration."""


class InvariantViolation(MachineError):
    pass


# ----------------------------------------------------------- constructions

class ConstructionError(TopomataError):
    pass


class ClassMapConflict(ConstructionError):
    def __init__(self, symbol, v: int, w: int):
        self.witness = (symbol, v, w)
        super().__init__(
            f"indistinguishable points {v}, {w} map to distinguishable points "
            f"under operator for {symbol!r}"
        )


class AcceptRejectClash(ConstructionError):
    def __init__(self, cls: int):
        self.witness = cls
        super().__init__(f"class {cls:#x} meets both accept and reject sets")


class InitialNotOpen(ConstructionError):
    pass


class PreconditionTopology(ConstructionError):
    pass


class EmptyObservable(ConstructionError):
    pass


# --------------------------------------------------------------------- cli

class ParseError(TopomataError):
    pass
