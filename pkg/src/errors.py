"""
Error Hierarchy - Exceptions shared by every peapod module
Each error maps to a CLI exit code and can describe itself as a JSON-ready dict
"""
from typing import Any, Dict, Optional

EXIT_UNEXPECTED = 5


class PeapodError(Exception):
    """Base class for all register-simulation errors"""

    exit_code = EXIT_UNEXPECTED

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable diagnostic for --json-errors"""
        return {
            'type': type(self).__name__,
            'message': self.message,
            'exit_code': self.exit_code,
            'details': self.details,
        }


class ConfigError(PeapodError):
    """Invalid or unreadable configuration"""
    exit_code = 2


class InfeasiblePlanError(PeapodError):
    """Addressing plan has conflicts or no feasible gradient exists below the ceiling"""
    exit_code = 3

    def __init__(self, message: str, report=None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.report = report


class DimensionLimitError(PeapodError):
    """Requested Hilbert-space dimension exceeds the configured limit"""
    exit_code = 4


class NumericalError(PeapodError):
    """Non-Hermitian generator, non-unitary result or unnormalised state"""
    exit_code = 5


# Argument-level errors: also ValueError so plain numeric code can catch them

class LayoutError(PeapodError, ValueError):
    """Unknown subsystem or dimension mismatch"""
    exit_code = 2


class SpinValueError(PeapodError, ValueError):
    """Spin quantum number is not a positive half-integer"""
    exit_code = 2


class PhysicsInputError(PeapodError, ValueError):
    """Negative field, nonpositive distance, bad temperature, bad site"""
    exit_code = 2


class GateError(PeapodError, ValueError):
    """Malformed gate specification or sequence"""
    exit_code = 2


class CarrierResolutionError(PeapodError, ValueError):
    """Pulse carrier matches no transition of the driven spin"""
    exit_code = 2


def describe_validation_errors(error) -> list:
    """Flatten a pydantic ValidationError into 'field.path: message' strings"""
    return [f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in error.errors()]
