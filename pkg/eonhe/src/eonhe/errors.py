"""Exception hierarchy shared by all eonhe modules."""

from pathlib import Path
from typing import Optional


class EonheError(Exception):
    """Base class for all errors raised by eonhe."""


class InvalidMaterialError(EonheError, ValueError):
    pass


class UnitError(EonheError, ValueError):
    pass


class ResolutionError(EonheError, ArithmeticError):
    """Grid too coarse or too short for the requested levels."""


class SpectrumTruncatedError(EonheError, ArithmeticError):
    """Fewer bound levels than requested."""


class IndexRangeError(EonheError, IndexError):
    """Level, site or time outside the valid range."""


class GeometryError(EonheError, ValueError):
    pass


class ParameterRangeError(EonheError, ValueError):
    """Physical input outside its valid range (negative field, temperature, rate)."""


class UnconfinedSiteError(EonheError, ValueError):
    pass


class StiffnessError(EonheError, ArithmeticError):
    pass


class RateConsistencyError(EonheError, ValueError):
    pass


class SpanError(EonheError, ValueError):
    pass


class SchedulingError(EonheError, ValueError):
    pass


class DetuningRangeError(EonheError, ValueError):
    """Requested detuning needs a voltage beyond the electrode bound."""


class ConfigError(EonheError, ValueError):
    def __init__(
        self,
        message: str,
        path: Optional[Path] = None,
        line: Optional[int] = None,
        key: Optional[str] = None,
    ) -> None:
        self.message = message
        self.path = path
        self.line = line
        self.key = key
        location = [
            str(part)
            for part in (
                path,
                f"line {line}" if line is not None else None,
                f"key '{key}'" if key is not None else None,
            )
            if part is not None
        ]
        super().__init__(f"{', '.join(location)}: {message}" if location else message)
