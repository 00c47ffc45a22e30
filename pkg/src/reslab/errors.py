"""Exception hierarchy shared by all reslab modules."""


class ReslabError(Exception):
    """Base class for every error raised by reslab."""


class ConstructionError(ReslabError, ValueError):
    pass


class UnknownVertex(ReslabError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SelfLoop(ConstructionError):
    pass


class SingletonHyperedge(ConstructionError):
    pass


class BoundaryAlreadyPresent(ConstructionError):
    pass


class DomainBoundary(ReslabError, ValueError):
    """Raised when a subgradient is requested on the edge of a capped domain."""


class InfiniteEnergy(ReslabError, ValueError):
    pass


class DimensionMismatch(ReslabError, ValueError):
    pass


class ZeroLinear(ReslabError, ValueError):
    pass


class NonPositiveParameter(ReslabError, ValueError):
    pass


class NonPositiveT(NonPositiveParameter):
    pass


class NonPositiveEpsilon(NonPositiveParameter):
    pass


class NonPositiveAlpha(NonPositiveParameter):
    pass


class TooLarge(ReslabError, ValueError):
    """The nested Orlicz computation was refused because the form is too big."""


class PreconditionError(ReslabError, ValueError):
    """A checker was handed inputs outside the hypotheses it tests."""


class DirichletOperand(PreconditionError):
    pass


class MixedExponents(PreconditionError):
    pass


class ParseError(ReslabError, ValueError):
    """Malformed network or vector file.

    ``field`` is a dotted path into the JSON document (``edges[2].w.c``) and
    ``line`` the 1-based line number when the JSON itself did not parse.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class SolverWarning(UserWarning):
    """Emitted when an optimization stopped at its iteration limit."""
