"""Exception types shared across the package."""


class TracelabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TracelabError):
    """A configuration value is out of range or inconsistent."""


class DomainError(TracelabError):
    """An operation was called with arguments outside its domain."""


class GenerationError(TracelabError):
    """Instance generation could not finish (e.g. rejection budget spent)."""


class SearchFailure(TracelabError):
    """A search ended without a plan (unsolvable or budget exceeded)."""


class EncodingError(TracelabError):
    """A value cannot be represented in the token vocabulary."""


class InputError(TracelabError):
    """An input file is malformed or inconsistent with its dataset."""
