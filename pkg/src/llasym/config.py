"""Default tolerances and guard radii, overridable per call site.

A single struct holds every numerical default so that tests can tighten
or relax them coherently; moduli k near 0 or 1 degrade conditioning, so
the defaults target k in [0.2, 0.9].
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy knobs shared across modules."""

    guard_radius: float = 1e-8        # pole exclusion distance on the torus
    det_floor: float = 1e-13          # 2x2 inversion floor
    identity_tol: float = 1e-10       # generic identity residual
    ode_rtol: float = 1e-10           # Jost integration relative tolerance
    ode_atol: float = 1e-12
    sie_refine_tol: float = 1e-9      # iterative-refinement residual target
    c_floor: float = 1e-10            # symmetrization determinant floor
    eps_tail: float = 1e-10           # spin-field tail deviation bound
    eval_floor_scale: float = 0.5     # off-contour floor c/(1+|w3|)

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULT = Tolerances()
