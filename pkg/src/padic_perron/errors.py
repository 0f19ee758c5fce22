"""Exception hierarchy shared by the library and the CLI."""


class PerronError(Exception):
    """Base class for every error raised by this package."""


class InputError(PerronError, ValueError):
    """Malformed user input: bad rationals, ragged matrices, non-prime p."""


class ContextError(PerronError, ValueError):
    """Operands live in different fields or have mismatched shapes."""


class HypothesisError(PerronError, ValueError):
    """A precondition of a certified bound does not hold for the input."""


class PrecisionError(PerronError, ArithmeticError):
    """The precision budget ran out before a decision could be certified."""


class InexactZeroError(PrecisionError, ZeroDivisionError):
    """Division by an element that is zero at its working precision."""


class CertificationError(PerronError):
    """A certified computation produced evidence contradicting its guarantee."""


class HenselError(CertificationError):
    """Newton iteration on the characteristic polynomial failed to contract."""


class ConvergenceError(CertificationError):
    """Repeated squaring did not reach a fixed point within the cap."""
