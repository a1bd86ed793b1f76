"""Exception hierarchy.

Input errors (malformed nets, unknown names, bad arguments) map to CLI exit
code 1; analysis-limit errors (state/event/enumeration caps) map to exit
code 2.
"""


class CliffedgeError(Exception):
    """Base class for every error raised by the package."""


class InputError(CliffedgeError):
    exit_code = 1


class AnalysisLimitError(CliffedgeError):
    exit_code = 2


# -- nets and firing ---------------------------------------------------------

class MalformedNet(InputError):
    pass


class SourceTransition(MalformedNet):
    pass


class MalformedMarking(InputError):
    pass


class NotEnabled(InputError):
    pass


class UnsafeFiring(CliffedgeError):
    pass


class UnsafeNet(InputError):
    pass


class StateLimitExceeded(AnalysisLimitError):
    pass


class ScriptNotFireable(InputError):
    pass


class NotDecidable(CliffedgeError):
    pass


# -- unfolding ---------------------------------------------------------------

class EventLimitExceeded(AnalysisLimitError):
    def __init__(self, limit, appended, pending):
        self.limit = limit
        self.appended = appended
        self.pending = pending
        super().__init__(
            f"event limit {limit} exceeded ({appended} events appended, "
            f"{pending} possible extensions pending)"
        )


class CapExceeded(AnalysisLimitError):
    pass


class UnknownEvent(InputError):
    pass


class UnknownNode(InputError):
    pass


class DifferentPrefixes(InputError):
    pass


class NotAConfiguration(InputError):
    pass


# -- doom / protectedness ----------------------------------------------------

class UnknownMarking(InputError):
    pass


class NotShaved(InputError):
    pass


class InvalidPair(InputError):
    pass


# -- file formats ------------------------------------------------------------

class PepSyntaxError(InputError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DuplicateName(InputError):
    pass


class DanglingArc(InputError):
    pass


class UnknownPlaceName(InputError):
    def __init__(self, line, name):
        self.line = line
        self.name = name
        super().__init__(f"line {line}: unknown place name {name!r}")
