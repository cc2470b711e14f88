"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or lengths."""


class ParseError(ValueError):
    """An input file could not be parsed.

    Names the file, line, and column when known so the user can jump to the
    offending token.
    """

    def __init__(self, message, file=None, line=None, column=None):
        parts = []
        if file is not None:
            parts.append(str(file))
        if line is not None:
            parts.append(f"line {line}")
        if column is not None:
            parts.append(f"column {column}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.file = file
        self.line = line
        self.column = column


class NumericalError(RuntimeError):
    """A numerical kernel failed (SVD non-convergence, non-SPD factorization).

    Carries enough context to diagnose the failing operand without holding
    a reference to it.
    """

    def __init__(self, message, rows=None, cols=None):
        if rows is not None and cols is not None:
            message = f"{message} (matrix {rows}x{cols})"
        super().__init__(message)
        self.rows = rows
        self.cols = cols
