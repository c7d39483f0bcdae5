"""condenselab: exact Boolean function complexity measures, restriction search and query games."""

__version__ = "0.1.0"

__all__ = [
    "andtree",
    "claims",
    "condense",
    "config",
    "constructions",
    "errors",
    "fnrep",
    "games",
    "measures",
    "paths",
    "reports",
    "spectral",
]
