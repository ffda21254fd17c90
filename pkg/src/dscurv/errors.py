"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid run configuration (bad key, bad value, unreadable file)."""


class SpacelikeError(Exception):
    """The graph fails the spacelike condition |grad u|^2 < cosh^2(u).

    Carries the flat indices of the offending grid nodes so callers
    (line searches, monitors) can react without re-deriving them.
    """

    def __init__(self, nodes, message=None):
        self.nodes = list(nodes)
        super().__init__(message or f"non-spacelike graph at {len(self.nodes)} node(s)")


class AdmissibilityError(Exception):
    """Principal curvatures left the Garding cone Gamma_k at some node."""

    def __init__(self, nodes=(), message=None):
        self.nodes = list(nodes)
        super().__init__(message or f"eigenvalues outside Gamma_k at {len(self.nodes)} node(s)")


class NewtonError(Exception):
    """Newton iteration failed to converge; carries the best iterate seen."""

    def __init__(self, message, best_u=None, residual_norm=None, iterations=0):
        self.best_u = best_u
        self.residual_norm = residual_norm
        self.iterations = iterations
        super().__init__(message)


class ContinuationError(Exception):
    """Homotopy continuation could not reach the target parameter.

    The numerical analogue of a solution path leaving the admissible
    bound set; carries the trace accumulated so far.
    """

    def __init__(self, message, state=None):
        self.state = state
        super().__init__(message)


class InternalConsistencyError(Exception):
    """An internal diagnostic failed (non-elliptic block, wrong start sign).

    Indicates a bug in the geometry/solver pipeline rather than bad input.
    """
