class HadronError(Exception):
    """Base class for every error raised by hadronvqe."""


class DimensionError(HadronError, ValueError):
    """Operands live on different numbers of qubits."""


class ParameterError(HadronError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""


class UnsupportedGateError(HadronError, ValueError):
    """The gate kind is not handled by the requested operation."""


class ConjugationLimitError(HadronError, RuntimeError):
    """Conjugating an operator produced more terms than the configured limit."""


class HermiticityError(HadronError, ValueError):
    """Complex phases did not cancel, the operator is not Hermitian."""


class CapacityError(HadronError, RuntimeError):
    """The problem is too large for a dense solve."""


class CircuitContractError(HadronError, ValueError):
    """A circuit does not satisfy the contract of the operation applied to it."""


class CacheMissError(HadronError, LookupError):
    """The evaluation cache does not hold the requested data."""


class OutOfDomainError(HadronError, ArithmeticError):
    """A cost function was evaluated where its formula is not defined."""


class SingularMatrixError(HadronError, ValueError):
    """A calibration matrix cannot be inverted."""


class ConfigError(HadronError, LookupError):
    """A configuration key is missing or malformed."""


class SolverError(HadronError, ArithmeticError):
    """A dense eigensolve returned pairs that fail the residual check."""
