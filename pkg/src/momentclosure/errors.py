"""Exception types shared across the package."""


class LatticeBuildError(ValueError):
    """Invalid seed/parameters when constructing a coefficient lattice."""


class DomainError(ValueError):
    """Evaluation requested outside the closure's mathematical domain."""


class QuadratureError(DomainError):
    """A kernel integral failed to converge or shows divergence."""


class NewtonError(DomainError):
    """Local inversion of the moment map did not converge."""
