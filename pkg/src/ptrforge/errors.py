"""Exception hierarchy; every failure mode raised by the package lives here.

Errors that report a concrete counterexample carry it in a `witness`
attribute so callers (and the CLI) can surface it without string parsing.
"""


class PtrForgeError(Exception):
    """Base class for all package errors."""


class NotPrime(PtrForgeError):
    def __init__(self, p):
        self.p = p
        super().__init__(f"{p} is not prime")


class DegreeOutOfRange(PtrForgeError):
    """Field order out of the supported window (e < 1 or p**e > 65536)."""


class DivisionByZero(PtrForgeError):
    pass


class IncompleteTable(PtrForgeError):
    """An operation table has the wrong shape or values outside range(q)."""


class ArityMismatch(PtrForgeError):
    pass


class AxiomViolation(PtrForgeError):
    """A structure failed one of its defining axioms.

    kind: short axiom tag, witness: offending tuple.
    """

    def __init__(self, kind, witness=None, message=None):
        self.kind = kind
        self.witness = witness
        super().__init__(message or f"axiom {kind} fails at {witness}")


class NotWeakPTR(AxiomViolation):
    pass


class NotQuasifield(AxiomViolation):
    pass


class NotPTR(AxiomViolation):
    pass


class OrderNotPrimePower(PtrForgeError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"{n} is not a prime power")


class NotQuadrangle(PtrForgeError):
    """Four points fail general position (some three are collinear)."""

    def __init__(self, points, message=None):
        self.points = tuple(points)
        super().__init__(message or f"not a quadrangle: {self.points}")


class LabellingInvalid(PtrForgeError):
    pass


class NotPropertyAForm(PtrForgeError):
    """Polynomial lacks the shape required for the slope/intercept split."""

    def __init__(self, monomial, message=None):
        self.monomial = monomial
        super().__init__(message or f"offending monomial {monomial}")


class AssumptionsUnmet(PtrForgeError):
    """A theorem checker was invoked on input outside its hypotheses."""

    def __init__(self, which, message=None):
        self.which = which
        super().__init__(message or f"hypotheses not satisfied: {which}")


class InternalContradiction(PtrForgeError):
    """Hypotheses verified yet the guaranteed conclusion failed.

    Reaching this means a bug in this package, not bad input.
    """

    def __init__(self, detail, witness=None):
        self.witness = witness
        super().__init__(f"verified hypotheses but conclusion failed: {detail}")


class NotTwoToOne(PtrForgeError):
    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"not two-to-one: {witness}")


class InvalidFlag(PtrForgeError):
    pass


class UnknownEntry(PtrForgeError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"no catalog entry named {name!r}")


class VerificationFailed(PtrForgeError):
    def __init__(self, entry, detail):
        self.entry = entry
        self.detail = detail
        super().__init__(f"catalog entry {entry!r} failed verification: {detail}")


class NotTransitive(PtrForgeError):
    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"transitivity fails at {witness}")


class GroupNotElementaryAbelian(PtrForgeError):
    pass


class GroupNotCyclic(PtrForgeError):
    pass


class QuadrangleNotInSubplane(PtrForgeError):
    pass


class InvalidWitness(PtrForgeError):
    pass
