"""Exception hierarchy for the claimcheck pipeline."""


class ClaimCheckError(Exception):
    """Base class for all claimcheck errors."""


class ProviderError(ClaimCheckError):
    """A backend could not be reached or failed after bounded retries."""


class ProtocolError(ClaimCheckError):
    """A backend replied outside its wire contract."""


class SchemaError(ClaimCheckError):
    """A model response failed strict-JSON validation."""


class EmptyDecomposition(ClaimCheckError):
    """Decomposition produced no usable atomic facts."""


class DecompositionFailed(ClaimCheckError):
    """Decomposition gave up after exhausting retries.

    Carries the last raw provider response for the trace.
    """

    def __init__(self, message: str, raw_response: str = ""):
        super().__init__(message)
        self.raw_response = raw_response


class SummarizationFailed(ClaimCheckError):
    """Web-evidence summarization failed; the fact keeps its local score."""


class VerifierUnavailable(ClaimCheckError):
    """The verifier backend failed; the example cannot be scored."""


class EmbeddingUnavailable(ClaimCheckError):
    """The embedding backend failed; callers fall back to token overlap."""


class ZeroVectorError(ClaimCheckError):
    """Cosine similarity is undefined for an all-zero vector."""


class DimensionError(ClaimCheckError):
    """Vectors of different dimensions cannot be compared."""


class LoadError(ClaimCheckError):
    """A dataset file could not be parsed into examples."""


class ConfigError(ClaimCheckError):
    """A configuration value is invalid or inconsistent."""
