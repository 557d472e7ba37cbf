"""Exception hierarchy shared across the workbench.

Every exception carries a stable ``code`` string so CLI reports and JSON
payloads can name the failure class without parsing messages.
"""

from __future__ import annotations


class MvdlError(Exception):
    """Base class for all workbench errors."""

    code = "error"


class InvalidParameter(MvdlError):
    code = "invalid-parameter"


class NotAQuantale(MvdlError):
    """Tensor does not residuate against the derived joins.

    ``witness`` is an (x, y, z) triple on which the residuation law fails.
    """

    code = "not-a-quantale"

    def __init__(self, message: str, witness: tuple[int, int, int]):
        super().__init__(message)
        self.witness = witness


class ClosureBudgetExceeded(MvdlError):
    code = "closure-budget-exceeded"


class BudgetExceeded(MvdlError):
    code = "budget-exceeded"

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class FormulaSyntaxError(MvdlError):
    code = "syntax-error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ArityMismatch(MvdlError):
    code = "arity-mismatch"


class UnknownIdentifier(MvdlError):
    code = "unknown-identifier"


class LengthMismatch(MvdlError):
    code = "length-mismatch"


class IncompatibleVariant(MvdlError):
    code = "incompatible-variant"


class UnknownAtom(MvdlError):
    code = "unknown-atom"


class MissingChi(MvdlError):
    code = "missing-chi"


class NonlinearAlgebra(MvdlError):
    code = "nonlinear-algebra"


class NoRule(MvdlError):
    code = "no-rule"

    def __init__(self, message: str, key: tuple[str, str, str] | None = None):
        super().__init__(message)
        self.key = key


class IterationPresent(MvdlError):
    code = "iteration-present"


class RewriteBudgetExceeded(MvdlError):
    code = "non-termination-guard"


class TagMismatch(MvdlError):
    code = "tag-mismatch"


class PreconditionViolated(MvdlError):
    code = "precondition-violated"

    def __init__(self, message: str, offender: str | None = None):
        super().__init__(message)
        self.offender = offender


class UnsupportedKind(MvdlError):
    code = "unsupported-kind"
