"""Shared error base.

Every validation-type failure in the library raises a subclass of
GamegenError; callers (CLI, service) can distinguish these from genuine
I/O errors when mapping to exit codes or HTTP statuses.
"""


class GamegenError(Exception):
    """Base class for all domain validation errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__
