class EcoreError(Exception):
    """Base class of every error raised by ecorelint."""


class XmiSyntaxError(EcoreError):
    """Input is not well-formed XML."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class XmiFormatError(EcoreError):
    """Well-formed XML that is not an acceptable Ecore document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


class LayoutFormatError(EcoreError):
    def __init__(self, message: str, field_path: str = ""):
        super().__init__(f"{field_path}: {message}" if field_path else message)
        self.field_path = field_path


class ConfigError(EcoreError):
    pass


class ElementNotFound(EcoreError, KeyError):
    def __init__(self, path):
        super().__init__(f"no element at {path}")
        self.path = path

    def __str__(self):
        return self.args[0]


class InstanceError(EcoreError):
    pass
