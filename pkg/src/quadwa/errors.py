"""Exceptions shared across the package.

``MathFailure`` subclasses are outcomes of the mathematics (the CLI maps them
to exit code 1); ``ValueError``-style problems with the input map to 2.
"""


class MathFailure(Exception):
    """A well-posed computation with a negative or unreachable outcome."""

    def diagnostic(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class NotGloballySoluble(MathFailure):
    def __init__(self, place, message: str = ""):
        self.place = place
        super().__init__(message or f"local obstruction at place {place}")

    def diagnostic(self) -> dict:
        d = super().diagnostic()
        d["place"] = self.place
        return d


class HeightBoundExceeded(MathFailure):
    def __init__(self, bound, best=None, message: str = ""):
        self.bound = bound
        self.best = best
        super().__init__(message or f"no witness found within search bound {bound}")

    def diagnostic(self) -> dict:
        d = super().diagnostic()
        d["bound"] = self.bound
        return d


class HenselConditionFailed(MathFailure):
    def __init__(self, value_val, grad_val, message: str = ""):
        self.value_val = value_val
        self.grad_val = grad_val
        super().__init__(
            message or f"Hensel condition fails: val(w(v))={value_val}, val(grad)={grad_val}"
        )


class PrecisionExhausted(MathFailure):
    def __init__(self, message: str, trace=None):
        self.trace = trace or []
        super().__init__(message)

    def diagnostic(self) -> dict:
        d = super().diagnostic()
        d["trace"] = [str(t) for t in self.trace]
        return d


class MaxIterationsExceeded(MathFailure):
    def __init__(self, best_residual: float, message: str = ""):
        self.best_residual = best_residual
        super().__init__(message or f"solver did not converge, best residual {best_residual:.3e}")


class NotAdmissible(MathFailure):
    pass


class RestrictionNotInjective(MathFailure):
    pass


class NoCrossing(MathFailure):
    pass


class InsufficientInertia(MathFailure):
    pass


class DegenerateChart(MathFailure):
    """Parametrization or its inverse hit a tangent direction."""


class InconsistentTarget(ValueError):
    """A target point is not within its precision of a local point of the system."""
