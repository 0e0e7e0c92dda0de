"""Common exception base for scientifically meaningful failures.

Every domain error raised by this package derives from ``QeslabError`` so
that frontends (CLI, service) can map the whole family to one exit path.
Errors are defined next to the code that raises them; this module only hosts
the base class.
"""


class QeslabError(Exception):
    """Base class for domain errors (invalid sector, branch, grid, ...)."""
