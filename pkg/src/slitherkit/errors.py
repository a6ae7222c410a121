"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation's input fails a checked hypothesis; ``witness`` says where."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsupportedInputError(ValueError):
    """Input is valid but outside what the operation can certify."""


class ResolutionError(RuntimeError):
    """A numerical result failed its own refinement check."""
