"""Exception hierarchy for the toolkit.

Every domain failure raises a subclass of ChopkitError so callers (and the
CLI) can separate expected geometric/configuration failures from bugs.
"""


class ChopkitError(Exception):
    """Base class for all toolkit domain errors."""


# --- configuration -----------------------------------------------------------

class ConfigError(ChopkitError):
    """Config document failed to parse or violated a parameter invariant."""


# --- geometry ----------------------------------------------------------------

class NoIntersection(ChopkitError):
    """Sphere does not reach the requested plane."""


class DisjointCircles(ChopkitError):
    """Circle separation exceeds the sum of radii."""


class ContainedCircles(ChopkitError):
    """One circle lies strictly inside the other."""


class ConcentricCircles(ChopkitError):
    """Circle centers coincide; the radical line is undefined."""


class NoFeasibleSolution(ChopkitError):
    """Both candidate intersection points fall outside the servo ROM."""


# --- kinematics --------------------------------------------------------------

class OutOfReach(ChopkitError):
    """Target XY radius is at or beyond the chopstick length."""


class TravelExceeded(ChopkitError):
    """Required platform travel falls outside the linear travel range."""


class LinkageInfeasible(ChopkitError):
    """A linkage closure has no real solution for the commanded pose."""


class RomViolated(ChopkitError):
    """A servo horn angle falls outside the admissible ROM."""


class NoConvergence(ChopkitError):
    """Forward-kinematics solver failed to reach the residual tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MultipleBranches(ChopkitError):
    """Forward kinematics found more than one closure branch in the solve window."""

    def __init__(self, message, solutions=()):
        super().__init__(message)
        self.solutions = tuple(solutions)


# --- workspace / hull --------------------------------------------------------

class DegenerateInput(ChopkitError):
    """Input points are coplanar/collinear; no 3D hull exists."""


# --- validation --------------------------------------------------------------

class MissingColumn(ChopkitError):
    """Required CSV column absent from the header."""


class NonNumericField(ChopkitError):
    """A CSV data field failed numeric parsing (carries the row index)."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class EmptyFile(ChopkitError):
    """CSV file contained a header but no data rows (or nothing at all)."""


class InsufficientData(ChopkitError):
    """Too few records for the requested statistic."""


# --- sensing -----------------------------------------------------------------

class WindowTooShort(ChopkitError):
    """Tare window holds fewer samples than the required minimum."""


class NoContact(ChopkitError):
    """No contact event found in the sample stream."""


# --- grasping ----------------------------------------------------------------

class ObjectTooWide(ChopkitError):
    """Object width meets or exceeds the platform baseline."""


class UnreachablePinch(ChopkitError):
    """A pinch tip target failed IK on one platform (carries platform name)."""

    def __init__(self, message, platform=None, cause=None):
        super().__init__(message)
        self.platform = platform
        self.cause = cause


class InfeasibleProfile(ChopkitError):
    """Trajectory profile parameters are nonpositive or otherwise unusable."""


# --- servo bus ---------------------------------------------------------------

class PayloadTooLong(ChopkitError):
    """Frame payload exceeds the 250-byte limit."""


class UnknownOpcode(ChopkitError):
    """Opcode is not part of the documented protocol."""
