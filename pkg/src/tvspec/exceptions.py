"""Exception types raised across the package."""


class DegenerateInputError(ValueError):
    """Input carries no usable second-order structure (e.g. a constant series)."""


class FormatError(ValueError):
    """A data file could not be parsed into the expected layout."""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"{message} (row {row})")
        self.row = row
