"""Exception hierarchy shared across the engine.

The CLI maps these onto exit codes: parse errors (data or query text) exit 2,
planning errors exit 3, I/O errors exit 4.
"""


class WcojError(Exception):
    """Base class for engine errors."""


class CapacityError(WcojError):
    """Dictionary key space (32-bit) exhausted."""


class UnknownKeyError(WcojError, KeyError):
    """decode() called with a key that was never assigned."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep the message readable
        return Exception.__str__(self)


class TripleParseError(WcojError):
    """Malformed line in a triple file (carries the 1-based line number)."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class QuerySyntaxError(WcojError):
    """Malformed query text (carries a character offset)."""

    def __init__(self, message: str, position: int):
        super().__init__(f"at offset {position}: {message}")
        self.position = position


class UnsupportedFeatureError(WcojError):
    """Query uses a construct outside the conjunctive BGP subset."""


class UnresolvedPrefixError(WcojError):
    """Query references a prefix with no PREFIX declaration."""


class UnknownPredicateError(WcojError):
    """A hypergraph was built against a predicate missing from the catalog."""


class PlanError(WcojError):
    """Planning failed (e.g. too many edges to enumerate GHDs)."""


class InfeasibleCoverError(PlanError):
    """A cover LP has a vertex incident to no edge."""


class ArityMismatchError(WcojError):
    """Tuples passed to a trie builder disagree with the attribute order."""
