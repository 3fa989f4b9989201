"""Exception types shared across modules."""


class OwlMinerError(Exception):
    """Base class for all package-specific errors."""


class ParseError(OwlMinerError):
    """Malformed Turtle / expression syntax; carries a line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class IncomparableLiterals(OwlMinerError):
    """Literals cannot be compared in the requested datatype's value space."""


class UnknownPredicate(OwlMinerError):
    """Predicate absent from the index."""


class CombinatorialBudgetExceeded(OwlMinerError):
    """Exhaustive enumeration would exceed the configured candidate cap."""


class FetchError(OwlMinerError):
    """SPARQL endpoint request failed after retries, or the query budget ran out."""


class QueryBudgetExceeded(FetchError):
    """The per-run query cap was reached; treat like a fetch failure."""


class MissingCounts(OwlMinerError):
    """A counting sampling strategy was invoked without subject counts."""


class EmptyTargetSet(OwlMinerError):
    """No subjects to mine from."""


class DuplicateAxiom(OwlMinerError):
    """The axiom is already present in the ontology store."""


class ProofVerificationFailed(OwlMinerError):
    """A mined pattern's proof set contains a term the matcher rejects."""


class UnsupportedConstruct(OwlMinerError):
    """Pattern not expressible in the requested export format."""
