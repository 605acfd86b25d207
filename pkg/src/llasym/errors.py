"""Structured exceptions shared by all llasym modules.

Numerical routines raise these instead of returning Inf/NaN so that
callers (quadrature mesh builders, CLI) can re-mesh or report
deterministically.
"""

from __future__ import annotations


class LlasymError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LlasymError):
    """An argument is outside the mathematically admissible range."""


class PoleProximityError(LlasymError):
    """Evaluation requested within the guard radius of a pole.

    Attributes
    ----------
    point : complex
        The offending evaluation point.
    pole : complex
        The nearest pole (lattice point or kernel pole).
    distance : float
        Torus distance between the two.
    """

    def __init__(self, point, pole, distance, what="pole"):
        self.point = point
        self.pole = pole
        self.distance = distance
        super().__init__(
            f"evaluation at {point} is within guard radius of {what} "
            f"at {pole} (distance {distance:.3e})"
        )


class RangeError(LlasymError):
    """A computed quantity left its admissible window (e.g. stationary
    point pushed against an interval endpoint)."""


class IntegrationError(LlasymError):
    """ODE or quadrature failure; carries enough context to re-run."""


class SolverError(LlasymError):
    """Linear-system or fixed-point solver failure (near-singularity,
    non-convergent refinement)."""


class SolitonPresentError(LlasymError):
    """Winding number of a(lambda) around the boundary of Omega_+ is
    nonzero; the reflection coefficient is rejected for the RHP
    pipeline."""

    def __init__(self, winding):
        self.winding = winding
        super().__init__(f"a(lambda) has winding number {winding} != 0 on the "
                         "boundary of Omega_+; input appears to contain solitons")


class ConfigError(LlasymError):
    """Malformed or contradictory experiment configuration."""


class ConsistencyError(LlasymError):
    """An internal cross-check failed beyond tolerance (e.g. non-unit
    reconstructed spin vector, symmetry self-test of a synthetic
    reflection coefficient)."""
