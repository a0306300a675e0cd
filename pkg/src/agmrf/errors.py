"""Exception types shared across the package."""


class MRFError(Exception):
    """Base class for all package errors."""


class ConfigError(MRFError, ValueError):
    pass


class StructureError(MRFError, ValueError):
    """Shapes or indices inconsistent with a graph structure."""


class InputError(MRFError, ValueError):
    pass


class OracleSizeError(MRFError):
    """Brute-force enumeration would exceed the configured state-space cap."""


class ContractError(MRFError, ValueError):
    pass


class CapabilityError(MRFError):
    """A computation uses a primitive the second-order path does not support."""


class QueryError(MRFError, ValueError):
    pass


class ParseError(MRFError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormatError(MRFError, ValueError):
    """Checkpoint version, kind, checksum or shape mismatch."""


class TrainingDivergedError(MRFError, RuntimeError):
    def __init__(self, message, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint
