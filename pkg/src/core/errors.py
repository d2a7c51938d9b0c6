# File: src/core/errors.py
# Exception hierarchy shared by every module

class PhaseSpaceError(Exception):
    """
    Base class for all library errors

    Args:
        message (str): Human readable description
        **context: Extra values describing where the error happened
    """

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self):
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value!r}" for key, value in sorted(self.context.items()))
        return f"{self.message} ({details})"


# Algebra
class AlgebraError(PhaseSpaceError):
    pass


class OddDimension(AlgebraError):
    pass


class NotAntisymmetric(AlgebraError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class SingularShift(AlgebraError):
    pass


class NotClassD(AlgebraError):
    pass


class NotHermitianCovariance(AlgebraError):
    pass


class SymmetryViolation(AlgebraError):
    pass


# Fock-space oracle
class OracleError(PhaseSpaceError):
    pass


class TooManyModes(OracleError):
    pass


class TooManyModesForExpansion(OracleError):
    pass


class BadIndex(OracleError):
    pass


class InvalidState(OracleError):
    pass


# Q-function
class QFunctionError(PhaseSpaceError):
    pass


class OutOfDomain(QFunctionError):
    pass


class RejectionStall(QFunctionError):
    pass


class EmptySample(QFunctionError):
    pass


# Operator derivatives
class DerivativeError(PhaseSpaceError):
    pass


class StepOutOfRange(DerivativeError):
    pass


# Dynamics
class DynamicsError(PhaseSpaceError):
    pass


class StepTooLarge(DynamicsError):
    pass


class ZeroInitialCondition(DynamicsError):
    pass


class AllTrajectoriesLost(DynamicsError):
    pass


class CFLViolation(DynamicsError):
    pass


class InvalidModel(DynamicsError):
    pass


# Configuration / CLI
class ConfigError(PhaseSpaceError):
    pass


class ConfigParse(ConfigError):
    pass


class UnknownConfigKey(ConfigError):
    pass


class UnknownScenario(ConfigError):
    pass


# Output
class OutputError(PhaseSpaceError):
    pass


class NonFiniteValue(OutputError):
    pass
