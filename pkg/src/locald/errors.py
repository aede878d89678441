"""Exception hierarchy for locald."""


class LocalDError(Exception):
    """Base class for every domain error raised by the package."""


class GraphError(LocalDError):
    pass


class DisconnectedGraph(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class UnknownNode(GraphError):
    pass


class DisconnectedPrefix(GraphError):
    pass


class DisconnectedPart(GraphError):
    pass


class GraphTooLarge(GraphError):
    pass


class ViewTooLarge(GraphError):
    pass


class RoundCapExceeded(LocalDError):
    def __init__(self, message: str, pending=()):
        super().__init__(message)
        self.pending = tuple(pending)


class MalformedInput(LocalDError):
    pass


class Unsupported(LocalDError):
    pass


class CodecError(LocalDError):
    pass


class ThresholdViolated(LocalDError):
    pass


class BitBudgetExceeded(LocalDError):
    pass


class NotInLanguage(LocalDError):
    pass


class SearchSpaceTooLarge(LocalDError):
    pass


class NoAcceptingCertificateFound(LocalDError):
    pass


class RadiusTooLarge(LocalDError):
    pass


class PsiCapExceeded(LocalDError):
    pass


class EnumerationTooLarge(LocalDError):
    pass
