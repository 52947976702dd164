from config import EXIT_INVALID_INPUT, EXIT_UNSUPPORTED


class PolywalkError(Exception):
    """Base class for every error the library raises on purpose."""

    exit_code = EXIT_INVALID_INPUT


# Invalid input (exit 2)

class ShapeError(PolywalkError):
    pass


class ParseError(PolywalkError):
    pass


class InvalidSpec(PolywalkError):
    pass


class InvalidRankFunction(InvalidSpec):
    pass


class DuplicateRows(PolywalkError):
    def __init__(self, rows):
        self.rows = list(rows)
        super().__init__(f"Duplicate inequality rows: {self.rows}")


class ZeroVector(PolywalkError):
    pass


class NotInKernel(PolywalkError):
    pass


class PointNotInPolyhedron(PolywalkError):
    pass


class InfeasibleDirection(PolywalkError):
    def __init__(self, index=None, message=None):
        self.index = index
        if message is None:
            message = f"Direction {index} is infeasible at its point" if index is not None else "Infeasible direction"
        super().__init__(message)


class InfeasibleClustering(PolywalkError):
    pass


class NotIntegralPolytope(PolywalkError):
    pass


class DegenerateInput(PolywalkError):
    pass


class EmptyPolyhedron(PolywalkError):
    pass


class SingularMatrix(PolywalkError):
    pass


# Unsupported (exit 3)

class SizeLimitExceeded(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class NotPointed(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class Unbounded(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class UnboundedDirection(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class NotSimple(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class NotMinimal(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class NotFullDimensional(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class DimensionTooHigh(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class BudgetExceeded(PolywalkError):
    exit_code = EXIT_UNSUPPORTED

    def __init__(self, max_points, partial=None):
        self.max_points = max_points
        self.partial = partial
        super().__init__(f"Exploration stopped after {max_points} points")


class GCWUnsupported(PolywalkError):
    exit_code = EXIT_UNSUPPORTED


class RecognitionSelfCheckFailed(PolywalkError):
    exit_code = EXIT_UNSUPPORTED
