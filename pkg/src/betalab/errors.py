"""Exception hierarchy shared by all betalab modules.

Two broad families matter for the CLI exit codes: input/usage problems
(exit 2) and resource limits hit at runtime (exit 3).
"""


class BetalabError(Exception):
    """Base class for all betalab errors."""


class UsageError(BetalabError):
    """Bad input: malformed words, inadmissible arguments, broken invariants."""


class ResourceError(BetalabError):
    """A configured precision or search budget was exhausted."""


class InvalidBeta(UsageError):
    pass


class UndecidableAtPrecision(ResourceError):
    pass


class NotSelfAdmissible(UsageError):
    pass


class DegenerateRoot(UsageError):
    pass


class NotIncreasing(UsageError):
    pass


class AlphabetMismatch(UsageError):
    pass


class NotAdmissibleInput(UsageError):
    pass


class LengthMismatch(UsageError):
    pass


class BudgetExceeded(ResourceError):
    pass


class InsufficientSample(UsageError):
    pass


class DepthTooShallow(UsageError):
    pass


class GrowthViolation(UsageError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class EmptyPool(UsageError):
    def __init__(self, message, target=None):
        super().__init__(message)
        self.target = target


class NoSingleEditFound(BetalabError):
    pass


class NotFound(BetalabError):
    pass


class OscillationNotObserved(BetalabError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
