"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class InfeasibleDesign(ValueError):
    """Observer design parameters fall outside their admissible region."""


class NumericOverflow(ArithmeticError):
    """A simulated quantity became non-finite.

    Carries the simulation time and, when known, the Monte Carlo path index.
    """

    def __init__(self, message, time=None, path_index=None):
        self.time = time
        self.path_index = path_index
        parts = [message]
        if time is not None:
            parts.append(f"t={time!r}")
        if path_index is not None:
            parts.append(f"path={path_index}")
        super().__init__(", ".join(parts))
