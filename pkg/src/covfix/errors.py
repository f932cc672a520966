__all__ = ["CovfixError"]


class CovfixError(Exception):
    """Base class for every error raised by covfix."""
