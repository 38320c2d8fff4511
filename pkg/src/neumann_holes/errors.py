"""Exception hierarchy shared by all subpackages."""


class NeumannHolesError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(NeumannHolesError, ValueError):
    """Invalid domain or hole description (e.g. hole not contained in the outer shape)."""


class MeshError(NeumannHolesError):
    """The mesher could not reach its quality targets."""


class NoHoleError(NeumannHolesError, ValueError):
    """An operation needs a Hole-tagged boundary but the mesh has none."""


class FactorizationError(NeumannHolesError, ArithmeticError):
    """A matrix expected to be positive definite failed to factor as such."""


class ConvergenceError(NeumannHolesError):
    """An iterative method hit its iteration cap."""


class AmbiguousSign(NeumannHolesError):
    """The sign convention cannot be applied because the inner product vanishes."""


class SimplicityError(NeumannHolesError):
    """The targeted eigenvalue is not simple."""


class DomainError(NeumannHolesError, ValueError):
    """Argument outside the mathematical domain of a closed-form expression."""


class OdeError(NeumannHolesError):
    """The radial shooting problem could not be solved."""


class RootBracketError(NeumannHolesError):
    """A root could not be bracketed."""


class OrderTooHigh(NeumannHolesError):
    """All Taylor coefficients up to the maximal order vanish."""


class ZeroVector(NeumannHolesError, ValueError):
    """A nonzero vector was required."""


class HypothesisError(NeumannHolesError, ValueError):
    """The hypotheses of the small-eigenvalue lemma are not met."""


class Unfittable(NeumannHolesError):
    """Too few usable points remain for a leading-order fit."""


class ConfigError(NeumannHolesError, ValueError):
    """Invalid experiment configuration."""


class IoError(NeumannHolesError, OSError):
    """An output file could not be written."""
