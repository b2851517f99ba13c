"""Exception types shared across the package."""


class MaxleafError(Exception):
    """Base class for all maxleaf errors."""


class ParseError(MaxleafError):
    """Input text does not conform to the edge-list format."""


class MalformedHeader(ParseError):
    pass


class VertexOutOfRange(ParseError):
    pass


class DuplicateArc(ParseError):
    pass


class SelfLoop(ParseError):
    pass


class NoOutBranching(MaxleafError):
    """The digraph has no spanning out-tree."""


class TooLarge(MaxleafError):
    """Instance exceeds a hard oracle size guard."""


class WouldCreateCycle(MaxleafError):
    """The requested 1-change does not yield an out-branching."""


class RootReparent(MaxleafError):
    """A 1-change may not give the root a parent."""


class RootCannotReachAll(MaxleafError):
    """The chosen root does not reach every vertex."""


class NotExtendable(MaxleafError):
    """The out-tree cannot be grown to a spanning one."""


class QNotFromRoot(MaxleafError):
    """Path-batched changes need a path starting at the tree root."""


class NotOneOptimal(MaxleafError):
    """An operation required a locally optimal out-branching."""


class InvalidDecomposition(MaxleafError):
    """A tree decomposition failed validation."""


class UselessArcsPresent(MaxleafError):
    """An operation required a digraph with no useless arcs."""


class HypothesisViolated(MaxleafError):
    """A path-procedure hypothesis failed; message names which one."""


class DegreeHypothesisViolated(MaxleafError):
    """In-degree requirements of the square-root bound not met."""


class UnsatisfiableSpec(MaxleafError):
    """Generator parameters admit no instance."""


class ConstructionError(MaxleafError):
    """An internal invariant of a constructive procedure failed.

    Raised instead of silently patching a witness; indicates either a
    violated precondition or a genuine bug worth surfacing.
    """
