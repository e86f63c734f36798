"""Exception hierarchy shared across the gateway."""


class EcorouteError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EcorouteError):
    """Invalid or missing configuration; the message names the offending key."""


class RuleTableError(EcorouteError):
    """A rule table failed to compile (duplicate id, malformed pattern, ...)."""


class DatasetError(EcorouteError):
    """An evaluation dataset file failed validation."""


class EmbeddingProviderError(EcorouteError):
    """An embedding provider could not produce a vector."""


class BackendError(EcorouteError):
    """Base class for inference-backend failures."""


class BackendTransportError(BackendError):
    """Transient transport failure talking to the model server (retriable)."""


class BackendProtocolError(BackendError):
    """The model server answered with a malformed or incomplete response."""
