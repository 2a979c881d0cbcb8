"""Exception types shared across the package."""


class NlnetopsError(Exception):
    """Base class for all package errors."""


class ParameterError(NlnetopsError):
    """A generator or operation parameter is out of its documented range."""


class InputError(NlnetopsError):
    """Degenerate or missing input (empty query, empty model reply)."""


class GraphParseError(NlnetopsError):
    """Interchange text is not well formed."""


class GraphValidationError(NlnetopsError):
    """A graph violates a structural or schema invariant.

    The message names the offending node, edge, or attribute.
    """


class ContextOverflowError(NlnetopsError):
    """A prompt exceeds the model's context limit.

    First-class outcome: the evaluator records it rather than treating it
    as a crash.
    """

    def __init__(self, estimated_tokens: int, context_limit: int):
        self.estimated_tokens = estimated_tokens
        self.context_limit = context_limit
        super().__init__(
            f"prompt estimate {estimated_tokens} tokens exceeds context limit {context_limit}"
        )


class TransportError(NlnetopsError):
    """Network-level failure talking to a model endpoint (after retries)."""


class RateLimitedError(NlnetopsError):
    """Provider rejected the call with a rate-limit response."""


class AuthError(NlnetopsError):
    """Missing or rejected credential for a live model endpoint."""


class FixtureMissError(NlnetopsError):
    """Replay fixture has no record for the requested bundle digest."""

    def __init__(self, key: str, attempt: int):
        self.key = key
        self.attempt = attempt
        super().__init__(f"no fixture record for key {key} attempt {attempt}")


class FixtureParseError(NlnetopsError):
    """Replay fixture file is malformed."""


class EnvelopeError(NlnetopsError):
    """A direct answer lacks a parseable result envelope."""


class SuiteDefectError(NlnetopsError):
    """A benchmark suite is self-inconsistent (e.g. a golden program fails)."""


class ConfigError(NlnetopsError):
    """A run matrix or config file is invalid; reported before any execution."""
