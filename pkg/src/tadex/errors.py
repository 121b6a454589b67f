"""Exception types shared across the package."""


class TadexError(Exception):
    """Base class for all package-specific errors."""


class GraphError(TadexError):
    """Invalid graph construction or query."""


class EmptyOrTooShort(GraphError):
    """Cycle needs at least three edges."""


class NonpositiveWeight(GraphError):
    """Edge weights must be strictly positive rationals."""


class EmptyTail(GraphError):
    """A tail must contain at least one edge."""


class BadAttachIndex(GraphError):
    """Tail attachment index outside the cycle."""


class UnknownNode(GraphError):
    """Referenced node label does not exist."""


class GraphFormatError(GraphError):
    """Malformed graph text."""


class EngineError(TadexError):
    """Runtime failure inside the exploration engine."""


class IllegalCommand(EngineError):
    """Policy issued a command over an unrevealed edge or from a wrong node."""


class NonTermination(EngineError):
    """Run exceeded the time guard or reached a livelock."""


class OracleInconsistency(EngineError):
    """Revelation oracle contradicted an earlier answer or its final graph."""


class WrongGraphClass(TadexError):
    """Strategy was started on a graph class it does not handle."""


class InsufficientAgents(TadexError):
    """Strategy needs more agents than the run provides."""


class ZeroOptimum(TadexError):
    """Competitive ratio is undefined for a zero offline optimum."""


class TooLarge(TadexError):
    """Instance exceeds the brute-force search budget."""


class BadParams(TadexError):
    """Adversary construction parameters out of range."""
