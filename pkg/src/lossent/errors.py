"""Exception types shared across the package."""


class ContractViolationError(ValueError):
    """An input or a computed quantity broke a documented numerical contract.

    The message names the violated invariant; the CLI maps this to exit
    code 3.
    """


class InfeasibleConstraintError(ContractViolationError):
    """A constraint system has no solution in the admissible region."""
