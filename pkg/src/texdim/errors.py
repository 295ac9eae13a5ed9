class DomainError(ValueError):
    """Input outside the domain where a formula or operation is defined."""


class ResourceError(RuntimeError):
    """A configured resource cap (enumeration size, memory) would be exceeded."""
