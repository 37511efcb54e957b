class BlochError(Exception):
    pass


class NumericalError(BlochError):
    pass


class InvalidMatrix(BlochError):
    pass


class InvalidDensityMatrix(BlochError):
    pass


class InvalidRates(BlochError):
    pass


class InvalidStrategy(BlochError):
    pass


class ConfigError(BlochError):
    pass


class NotHermitian(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class NodeCollision(NumericalError):
    pass


class SingularResolvent(NumericalError):
    pass


class VanishingCoefficient(NumericalError):
    pass


class OutOfRange(NumericalError):
    pass


class InsufficientResolution(NumericalError):
    pass


class TrajectoryIOError(BlochError):

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class StepFailure(NumericalError):

    def __init__(self, method, step, cause):
        super().__init__(f"method {method} failed at step {step}: {cause}")
        self.method = method
        self.step = step
        self.cause = cause


class UsageError(BlochError):
    pass
