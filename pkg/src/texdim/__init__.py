"""GLCM texture features, capacity bounds, intrinsic dimension and
distance-concentration diagnostics with brute-force / Monte Carlo oracles."""

from texdim.errors import DomainError, ResourceError

__version__ = "0.1.0"

__all__ = ["DomainError", "ResourceError", "__version__"]
