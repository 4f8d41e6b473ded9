class ShortTMError(Exception):
    pass


class CorpusFormatError(ShortTMError):
    pass


class EmbeddingFormatError(ShortTMError):
    pass


class ConfigError(ShortTMError, ValueError):
    pass


class SamplerError(ShortTMError, RuntimeError):
    """Invalid sampling weights (all zero, negative total or non-finite)."""


class InvariantError(ShortTMError, RuntimeError):
    """A count table went negative or disagrees with the assignments."""
