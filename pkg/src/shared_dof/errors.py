"""Exception taxonomy shared across the package.

Everything raised on purpose derives from SharedDofError so callers can
catch one base class at the CLI / service boundary and turn it into an
exit code or protocol error message.
"""


class SharedDofError(Exception):
    """Base class for all deliberate failures in this package."""


class InvalidTwistError(SharedDofError):
    """Twist contains non-finite components or has the wrong shape."""


class DegenerateDirectionError(SharedDofError):
    """A direction was requested from a (numerically) zero twist."""


class DegeneratePairError(SharedDofError):
    """Two twists are too close to collinear to orthonormalize."""


class InvalidModeError(SharedDofError):
    """Classic mode index outside 1..4."""


class NoIntentError(SharedDofError):
    """The view cone contains no candidate to score."""


class ScenarioError(SharedDofError):
    """Scenario file failed to parse or validate."""


class SessionFinishedError(SharedDofError):
    """advance() was called on a session whose task already reached Done."""


class ReportError(SharedDofError):
    """Metrics cannot be summarized or compared (empty or missing data)."""


class InvalidDirectionError(SharedDofError):
    """Vibrotactile encoder got a vector that is not unit length."""


class DecodeError(SharedDofError):
    """Vibrotactile pattern frames do not form a decodable pattern."""
