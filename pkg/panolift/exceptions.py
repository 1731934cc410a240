from typing import Optional


class PanoliftError(Exception):
    """Base class; `exit_code` is what the CLI returns for it."""
    exit_code = 2


class InvalidArgumentError(PanoliftError, ValueError):
    pass


class FormatError(PanoliftError):
    def __init__(self, path, detail: str, line: Optional[int] = None):
        self.path = str(path)
        self.detail = detail
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {detail}")


class EmptyMaskError(PanoliftError):
    pass


class UsageError(PanoliftError):
    exit_code = 1
