"""Exception types shared across the faultline pipeline."""


class FaultlineError(Exception):
    """Base class for all faultline errors."""


class CorpusError(FaultlineError):
    """Raised when a source tree or index cannot be ingested/loaded."""


class ReplyUnparseable(FaultlineError):
    """An LLM reply contained no usable entity tokens."""


class EmptyQueryAfterValidation(FaultlineError):
    """Every expansion entity was pruned against the corpus."""


class ProviderError(FaultlineError):
    """An LLM provider call failed.

    `retriable` tells callers whether retrying the identical request is
    sensible (network blips: yes; malformed fixture: no).
    """

    def __init__(self, message: str, retriable: bool = True):
        super().__init__(message)
        self.retriable = retriable


class SessionExhausted(FaultlineError):
    """The reformulation cycle budget for a session is spent."""


class TrainingDataDegenerate(FaultlineError):
    """No informative (relevant, irrelevant) pairs could be constructed."""
