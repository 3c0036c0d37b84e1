"""Exception types shared across the toolkit.

CLI exit-code policy: ``DomainError`` and subclasses map to exit code 1,
usage errors to 2, ``BackendError`` and I/O failures to 3.
"""

from __future__ import annotations


class StlkitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(StlkitError):
    """Invalid input or a failed domain operation."""


class LexError(DomainError):
    """Unrecognized character in formula text."""

    def __init__(self, position: int, char: str):
        super().__init__(f"unrecognized character {char!r} at offset {position}")
        self.position = position
        self.char = char


class ParseError(DomainError):
    """Token stream does not match the formula grammar."""

    def __init__(self, message: str, span: tuple[int, int], expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.span = span
        self.expected = expected


class IntervalError(DomainError):
    """Temporal interval violates 0 <= lo < hi."""

    def __init__(self, lo: float, hi: float, span: tuple[int, int] | None = None):
        if lo == hi:
            message = f"singular interval [{lo:g},{hi:g}]"
        elif lo > hi:
            message = f"interval lower bound {lo:g} exceeds upper bound {hi:g}"
        else:
            message = f"interval bounds must be nonnegative, got [{lo:g},{hi:g}]"
        super().__init__(message)
        self.lo = lo
        self.hi = hi
        self.span = span


class EvaluationError(DomainError):
    """Formula cannot be evaluated on the given trace."""


class UnknownVariable(EvaluationError):
    def __init__(self, name: str):
        super().__init__(f"trace has no variable named {name!r}")
        self.name = name


class NonSampleTime(EvaluationError):
    def __init__(self, t: float):
        super().__init__(f"t={t:g} is not a sample timestamp of the trace")
        self.t = t


class HorizonExceeded(EvaluationError):
    def __init__(self, t: float, upper: float, horizon: float):
        super().__init__(
            f"window [{t:g}+l,{t:g}+{upper:g}] extends past the trace horizon {horizon:g}"
        )
        self.t = t
        self.upper = upper
        self.horizon = horizon


class MissingInterval(EvaluationError):
    """Temporal operator without an interval cannot be monitored."""


class TraceFormatError(DomainError):
    """Trace file violates the CSV trace schema."""


class LengthMismatch(DomainError):
    """Reference and prediction collections are not aligned."""


class ParseFailure(DomainError):
    """A dataset pair's formula does not parse."""

    def __init__(self, pair_id: str, reason: str):
        super().__init__(f"pair {pair_id!r} does not parse: {reason}")
        self.pair_id = pair_id


class EmptyCorpus(DomainError):
    """Embedding provider used before fitting on a corpus."""


class ProviderError(StlkitError):
    """Embedding provider failure."""


class EmptyStore(DomainError):
    """Operation requires a non-empty knowledge store."""


class TooFewPoints(DomainError):
    """Clustering requires at least k points."""

    def __init__(self, k: int, n: int):
        super().__init__(f"need at least k={k} points, store has {n}")
        self.k = k
        self.n = n


class StoreFormatError(DomainError):
    """Knowledge store file violates the JSONL schema."""


class BackendError(StlkitError):
    """Language-model backend failure."""


class BackendTimeout(BackendError):
    def __init__(self, seconds: float):
        super().__init__(f"backend request timed out after {seconds:g}s")
        self.seconds = seconds


class HttpStatusError(BackendError):
    def __init__(self, code: int, detail: str = ""):
        super().__init__(f"backend returned HTTP {code}" + (f": {detail}" if detail else ""))
        self.code = code


class ScriptExhausted(BackendError):
    def __init__(self, tag: str):
        super().__init__(f"scripted backend has no remaining response for tag {tag!r}")
        self.tag = tag


class CredentialMissing(BackendError):
    def __init__(self, env_var: str):
        super().__init__(f"environment variable {env_var!r} is not set")
        self.env_var = env_var


class MalformedResponse(DomainError):
    """Backend response contained no parseable payload."""


class AllRetriesInvalid(DomainError):
    """Every generation attempt produced an invalid formula."""

    def __init__(self, last_output: str, transcript: list):
        super().__init__("no syntactically valid formula after all retries")
        self.last_output = last_output
        self.transcript = transcript


class UnknownCandidate(DomainError):
    def __init__(self, pair_id: str):
        super().__init__(f"decision references unknown queued candidate {pair_id!r}")
        self.pair_id = pair_id


class TransformFailed(DomainError):
    """No valid formula could be obtained for a transformation request."""

    def __init__(self, message: str, transcript: list):
        super().__init__(message)
        self.transcript = transcript
