"""Exception hierarchy shared across the package.

The CLI maps these onto its exit statuses: InputError covers anything wrong
with user-supplied text or files, PreconditionError covers operations invoked
outside their contract on otherwise well-formed data.
"""


class BoolreasonError(Exception):
    """Base class for every error raised by this package."""


class InputError(BoolreasonError):
    """Malformed input: DSL text, instance strings, circuit files, bad flags."""


class PreconditionError(BoolreasonError):
    """A well-formed request that violates an operation's contract."""
