"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input fails a structural precondition (shape, hermiticity, range)."""


class OutOfBallError(ValidationError):
    """Operator norm exceeds the admissible bound of a ball-domain map."""


class DomainError(ValidationError):
    """A scalar function is undefined at an eigenvalue of the operand."""


class BoundaryCollisionError(ValidationError):
    """An eigenvalue sits too close to a spectral window edge."""


class NotInCoveringError(ValidationError):
    """The spectrum meets the forbidden symmetric point set."""


class SurgeryViolationError(ValidationError):
    """A replacement block has spectrum inside the protected window."""


class DegeneracyError(ValidationError):
    """An operator required to be injective is numerically singular."""


class BranchCutError(ValidationError):
    """A unitary has spectrum at the logarithm branch point -1."""


class NonConvergenceError(RuntimeError):
    """Adaptive refinement exhausted its budget."""


class ConditioningError(RuntimeError):
    """A quantity stays ill-conditioned under the stated perturbation rules."""
