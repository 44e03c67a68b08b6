"""Exception hierarchy shared by every module."""


class ModfactorError(Exception):
    """Base class for all library errors."""


class InvalidInput(ModfactorError, ValueError):
    """Shapes, specs or algebras do not match."""


class NotPositive(ModfactorError):
    """A matrix that must be positive semidefinite is not."""


class NotCP(ModfactorError):
    """A linear map that must be completely positive is not."""


class NotPhiMap(ModfactorError):
    """A module map violates the phi-map identity."""


class NotFull(ModfactorError):
    """Inner products of a module do not span the coefficient algebra."""


class Inconsistent(ModfactorError):
    """A linear system that should be exactly solvable has a residual."""


class NotIsometry(ModfactorError):
    """A module map fails to preserve inner products."""


class WellDefinednessFailure(ModfactorError):
    """A map defined on spanning vectors does not kill the null space."""


class WrongShape(ModfactorError):
    """Input does not have the structure the construction requires."""


class InternalError(ModfactorError):
    """A construction produced an invalid object from valid-looking input."""


class ParseError(ModfactorError):
    """Malformed instance file."""

    def __init__(self, message, *, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line
