"""Exception hierarchy shared across the toolkit."""


class FdkitError(Exception):
    """Base class for all toolkit errors."""


class FieldTooSmall(FdkitError):
    """The prime p must exceed the dimension for trace-form radicals."""


class NotFiniteDimensional(FdkitError):
    """Path generation did not terminate within the length cap."""


class NotAdmissible(FdkitError):
    """A relation term has path length < 2."""


class NonComposablePath(FdkitError):
    """A path in a relation or label is not composable."""


class InhomogeneousRelation(FdkitError):
    """Relation mixes terms of different path lengths (unsupported)."""


class AmbientMismatch(FdkitError):
    """Subspaces/modules live over different ambient algebras."""


class AlgebraMismatch(FdkitError):
    """Modules or maps over different algebras were combined."""


class ZeroModule(FdkitError):
    """Operation requires a nonzero module."""


class NoIdempotents(FdkitError):
    """Algebra carries no complete primitive idempotent set."""


class NotAnIdeal(FdkitError):
    """Subspace is not an ideal of the expected kind."""


class NotLeftIdeal(FdkitError):
    """Subspace is not a left ideal of the bigger algebra."""


class NotTorsionless(FdkitError):
    """No embedding into a projective module was found."""


class RadicalCubeNonzero(FdkitError):
    """Triangular construction requires rad^3 = 0."""


class NotGenerator(FdkitError):
    """Module is not a generator (regular module not a summand)."""


class KernelNotInAddU(FdkitError):
    """Approximation kernel has a summand outside add(U)."""


class UnknownIdeal(FdkitError):
    """Named ideal missing from the extension specification."""


class CutoffExceeded(FdkitError):
    """Internal plateau/cycle search ran past its cutoff (likely a bug)."""


class BoundNotVerified(FdkitError):
    """Claimed Tor-vanishing bound could not be certified."""


class SplitNotFound(FdkitError):
    """No retraction found; a splitting hypothesis fails."""


class NotComposable(FdkitError):
    """Consecutive maps in a sequence do not compose."""


class VerificationFailed(FdkitError):
    """A construct-and-verify contract was violated."""


class InvariantViolation(FdkitError):
    """A declared type invariant failed at construction time."""


class ParseError(FdkitError):
    """Input document is malformed; message carries position info."""


class UsageError(FdkitError):
    """Bad command line invocation."""
