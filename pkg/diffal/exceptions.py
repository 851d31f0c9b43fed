class ScenarioError(Exception):
    """Exception raised when scenario parameters violate their invariants.

    Raised for source centers outside the admissible box, intensities outside
    [0, 1] and overlapping source disks when overlap is disallowed.

    Attributes:
        field (str): The offending parameter name
        value (float): The offending value
        message (str): The error message explaining the violation
    """

    def __init__(self, field: str, value: float, message: str = "Invalid scenario parameter"):
        self.field = field
        self.value = value
        self.message = f"{message}: {field}={value}"
        super().__init__(self.message)

class AdmissibleRegionEmpty(ScenarioError):
    """Exception raised when the lattice is too small to place the sources.

    Attributes:
        size (int): Lattice side length in pixels
        radius (float): Source radius in lattice units
    """

    def __init__(self, size: int, radius: float):
        self.size = size
        self.radius = radius
        super().__init__("size", size, f"Admissible region empty for radius {radius}")

class ShapeMismatch(ValueError):
    """Exception raised when two grids (or a grid and a model) disagree on shape.

    Attributes:
        expected (tuple): The expected shape
        actual (tuple): The shape that was received
    """

    def __init__(self, expected: tuple, actual: tuple):
        self.expected = tuple(expected)
        self.actual = tuple(actual)
        self.message = f"Shape mismatch: expected {self.expected}, got {self.actual}"
        super().__init__(self.message)

class SolverNonConvergence(Exception):
    """Exception raised when the steady-state solve misses its tolerance.

    Attributes:
        residual (float): The relative residual that was achieved
        iterations (int): Iterations spent before giving up
        index (int | None): Dataset entry being generated, if any
    """

    def __init__(self, residual: float, iterations: int, index: int | None = None):
        self.residual = residual
        self.iterations = iterations
        self.index = index
        where = f" at entry {index}" if index is not None else ""
        self.message = f"Solver did not converge{where}: residual {residual:.3e} after {iterations} iterations"
        super().__init__(self.message)

    def at_index(self, index: int) -> "SolverNonConvergence":
        return SolverNonConvergence(self.residual, self.iterations, index)

class StabilityBoundViolation(ValueError):
    """Exception raised when the explicit time step exceeds the stability bound.

    Attributes:
        dt (float): The requested time step
        bound (float): The exclusive upper bound 1 / (4D + gamma)
    """

    def __init__(self, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        self.message = f"Time step {dt} violates the stability bound dt < {bound}"
        super().__init__(self.message)

class DatasetFormatError(Exception):
    """Exception raised when a dataset container or checkpoint cannot be decoded.

    Attributes:
        path (str): The file that failed to decode
        message (str): The error message explaining the failure
    """

    def __init__(self, path: str, message: str = "Malformed container"):
        self.path = str(path)
        self.message = f"{message}: {self.path}"
        super().__init__(self.message)

class MagicMismatch(DatasetFormatError):
    """Exception raised when a file does not start with the expected magic bytes.

    Attributes:
        found (bytes): Magic read from the file
        expected (bytes): Magic of the format
    """

    def __init__(self, path: str, found: bytes, expected: bytes):
        self.found = found
        self.expected = expected
        super().__init__(path, f"Bad magic {found!r}, expected {expected!r}")

class VersionMismatch(DatasetFormatError):
    """Exception raised when a file carries a format version this build cannot read.

    Attributes:
        found (int): Version read from the file
        expected (int): Supported version
    """

    def __init__(self, path: str, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(path, f"Unsupported format version {found}, expected {expected}")

class TruncatedPayload(DatasetFormatError):
    """Exception raised when a payload is shorter than its header declares.

    Attributes:
        expected_bytes (int): Declared size (rows for the params table)
        actual_bytes (int): Size actually present
    """

    def __init__(self, path: str, expected_bytes: int, actual_bytes: int):
        self.expected_bytes = expected_bytes
        self.actual_bytes = actual_bytes
        super().__init__(path, f"Truncated payload ({actual_bytes} of {expected_bytes} bytes)")

class ModelConfigError(ValueError):
    """Exception raised for architecture or dropout misconfiguration.

    Examples are lattice sizes that halve down to zero, MC dropout on a model
    built without dropout, and entropy acquisition on a U-Net.
    """

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)

class TrainingDivergence(Exception):
    """Exception raised when the training loss stops being finite.

    Attributes:
        epoch (int): The epoch (1-based) in which the loss diverged
        loss (float): The offending loss value
    """

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        self.message = f"Non-finite training loss {loss} in epoch {epoch}"
        super().__init__(self.message)

class AcquisitionError(ValueError):
    """Exception raised when an acquisition request cannot be served.

    Attributes:
        strategy (str): The requested strategy
        reason (str): Why it was refused
    """

    def __init__(self, strategy: str, reason: str):
        self.strategy = strategy
        self.reason = reason
        self.message = f"Acquisition '{strategy}' failed: {reason}"
        super().__init__(self.message)

class CorruptRoundRecord(Exception):
    """Exception raised when a persisted round cannot be trusted on resume.

    Attributes:
        round_index (int): The round whose record is corrupt
        reason (str): What is wrong with it
    """

    def __init__(self, round_index: int, reason: str):
        self.round_index = round_index
        self.reason = reason
        self.message = f"Corrupt record for round {round_index}: {reason}"
        super().__init__(self.message)

class RunLocked(Exception):
    """Exception raised when another writer holds the lock of a run directory.

    Attributes:
        path (str): The locked run directory
        message (str): The error message
    """

    def __init__(self, path: str):
        self.path = str(path)
        self.message = f"Run directory is locked by another writer: {self.path}"
        super().__init__(self.message)

class UnreachableException(Exception):
    """Exception raised when a code path is unreachable.

    This exception is raised when a code path is unexpectedly reached, indicating
    a logical error or unexpected code execution in the code.

    Attributes:
        message (str): The error message explaining why the code path is unreachable
    """

    def __init__(self, message: str = "Unreachable code path"):
        self.message = message
        super().__init__(self.message)
