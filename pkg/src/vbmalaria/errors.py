"""Exception types shared across the package.

ValueError subclasses signal bad inputs (CLI exit code 1); RuntimeError
subclasses signal numerical failures (CLI exit code 2).
"""


class ParameterError(ValueError):
    """A parameter value violates a model constraint."""


class DegenerateStateError(ValueError):
    """Force-of-infection denominator pi*I_h + S_h vanished with infection present."""


class NotAnEquilibriumError(ValueError):
    """A state passed where an equilibrium is required has a nonzero residual."""


class CriticalityError(ValueError):
    """Operation requires a transmission criticality that does not exist here."""


class RegionExitError(RuntimeError):
    """A trajectory left the feasible region beyond tolerance."""


class StepSizeUnderflowError(RuntimeError):
    """Adaptive step size collapsed below the hard floor."""


class InternalConsistencyError(RuntimeError):
    """Two redundant computation paths disagreed; indicates a bug, not bad input."""
