"""Exception types shared across the package."""


class PfrsError(Exception):
    """Base class for all package errors."""


class NoAdmissiblePlacement(PfrsError):
    """Domain cannot hold a single particle center at the requested eps."""


class SeedExhausted(PfrsError):
    """Random placement hit the rejection cap before reaching the target count."""


class UnsupportedDimension(PfrsError):
    """Operation is only defined for a specific spatial dimension."""


class OverlappingSupports(PfrsError):
    """Particle centers too close for the transport field's disjoint-support construction."""


class StepTooLarge(PfrsError):
    """Explicit time step violates the stability heuristic."""


class NewtonDiverged(PfrsError):
    """Inverse-map Newton iteration failed to converge."""


class OutOfDomain(PfrsError):
    """A mapped query point left the computational box."""


class DeltaTooLarge(PfrsError):
    """Mollification width does not fit inside the time interval."""


class MissingDerivative(PfrsError):
    """Flow-map state lacks second derivatives required by the caller."""


class ShapeMismatch(PfrsError):
    """Field arrays do not match the staggering expected by an operator."""


class UnresolvableRadius(PfrsError):
    """Obstacle radius below the grid resolvability threshold (r >= 3h)."""


class SolverStalled(PfrsError):
    """Iterative solver hit its iteration cap before reaching tolerance."""


class CFLViolation(PfrsError):
    """Advective CFL condition dt <= h / max|u| violated."""


class CollisionDetected(PfrsError):
    """Moved particle centers violate the runtime separation thresholds."""


class UsageError(PfrsError):
    """Invalid command-line arguments or run configuration."""
