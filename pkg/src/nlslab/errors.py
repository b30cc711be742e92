"""Exception taxonomy shared by all nlslab modules."""


class NlsLabError(Exception):
    """Base class for everything raised deliberately by this package."""


class ConfigError(NlsLabError):
    """Malformed configuration: bad shapes, bad JSON fields, inconsistent sizes."""


class BlowUpError(NlsLabError):
    """A field left the trust region of the integrator (non-finite samples)."""


class ResolutionError(NlsLabError):
    """Root bookkeeping failed: a spectral window did not contain exactly two roots."""


class BranchCutError(NlsLabError):
    """A square-root evaluation point landed on (or inside) a gap interval."""


class GeometryError(NlsLabError):
    """A contour touches spectrum it must enclose or exclude."""


class SolverError(NlsLabError):
    """Newton iteration failed to converge within its budget."""
