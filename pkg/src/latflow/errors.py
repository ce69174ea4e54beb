"""Exception hierarchy shared by all latflow modules.

Everything derives from :class:`LatflowError` so callers (and the CLI) can
catch one base class.  Names describe the violated contract.
"""


class LatflowError(Exception):
    """Base class for all latflow errors."""


# -- sparse matrix construction / use ------------------------------------

class IndexOutOfBounds(LatflowError):
    pass


class DuplicateEntry(LatflowError):
    pass


class NonFiniteWeight(LatflowError):
    pass


class DimensionMismatch(LatflowError):
    pass


class NotSquare(LatflowError):
    pass


class NoConvergence(LatflowError):
    """Iteration hit its step limit.  Carries the last estimate."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


# -- topology generation --------------------------------------------------

class StencilWiderThanGrid(LatflowError):
    pass


class ArgumentTooSmall(LatflowError):
    pass


class DegreeTooLarge(LatflowError):
    pass


# -- rules ----------------------------------------------------------------

class RuleOutOfRange(LatflowError):
    pass


class KeyOutOfTable(LatflowError):
    """A matvec result does not index the rule table: stencil and rule disagree."""


class NonIntegerKey(LatflowError):
    pass


# -- engine / systems -----------------------------------------------------

class BadStateValue(LatflowError):
    pass


# -- analysis -------------------------------------------------------------

class TooFewRows(LatflowError):
    pass


class SingularSystem(LatflowError):
    pass


# -- file formats / config ------------------------------------------------

class FileFormatError(LatflowError):
    pass


class ConfigError(LatflowError):
    pass
