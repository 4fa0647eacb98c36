class SiloError(Exception):
    """Base class for every error raised by the silo solvers."""


class InvalidInputError(SiloError, ValueError):
    """Bad parameters, grids, sources or evaluation points."""


class ConfigError(InvalidInputError):
    """An experiment file could not be turned into an ExperimentConfig."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class AssemblyError(SiloError):
    """The assembled Neumann right-hand side is not compatible (non-zero mean)."""


class SolverConvergenceError(SiloError):
    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")


class NonFiniteStateError(SiloError):
    def __init__(self, step: int, message: str = "non-finite value in layer state"):
        self.step = step
        super().__init__(f"{message} at step {step}")


class StorageError(SiloError):
    def __init__(self, path, cause: Exception):
        self.path = path
        super().__init__(f"cannot write {path}: {cause}")
