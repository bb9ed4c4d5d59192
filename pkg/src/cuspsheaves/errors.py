"""Exception hierarchy.  Each family maps to one CLI exit code."""


class CuspError(Exception):
    exit_code = 2


class ParseError(CuspError):
    """Malformed input document or scalar."""

    exit_code = 1


class InvariantError(CuspError):
    """A value violates a data-type invariant or an operation contract."""

    exit_code = 2


class PrecisionMismatch(InvariantError):
    pass


class ContractViolation(InvariantError):
    pass


class MathPreconditionError(CuspError):
    """Input is well formed but outside the domain of the mathematics."""

    exit_code = 3


class RankDeficiencyError(MathPreconditionError):
    pass


class PrecisionError(MathPreconditionError):
    """Working precision is too small for an exact answer."""


class NonUnitError(MathPreconditionError):
    pass


class TorsionError(MathPreconditionError):
    """The extension datum is not injective, so the sheaf has torsion."""
