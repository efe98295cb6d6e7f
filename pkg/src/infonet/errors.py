"""Exception hierarchy shared across the toolkit."""


class InfonetError(Exception):
    """Base class for all errors raised by this package."""


class DataError(InfonetError):
    """Problems with input data (ingestion, shapes, values)."""


class InvalidValueError(DataError):
    """Non-numeric, NaN/infinite, or out-of-alphabet value encountered."""


class InsufficientSamplesError(DataError):
    """A lag, shift or estimator requirement exhausts the available samples."""


class InsufficientReplicationsError(DataError):
    """An operation needs more replications than the dataset provides."""


class EstimatorError(InfonetError):
    """Estimation failed for numerical or configuration reasons."""


class SingularCovarianceError(EstimatorError):
    """A required covariance matrix is singular or not positive definite."""


class DuplicatePointsError(EstimatorError):
    """Duplicate points survived jittering; neighbor radii are ill-defined."""


class StateSpaceTooLargeError(EstimatorError):
    """Joint discrete state space exceeds the configured cap."""


class StatsError(InfonetError):
    """Invalid statistical-test configuration."""


class InsufficientPermutationsError(StatsError):
    """Too few permutations for the test to ever reject at the given alpha."""


class InferenceError(InfonetError):
    """Network-inference level failure."""


class DegenerateTargetError(InferenceError):
    """Every replication of the target series is constant."""


class UnstableProcessError(InfonetError):
    """Generator topology defines an unstable (divergent) process."""


class EmptyLinkSetError(InfonetError):
    """Network comparison called without any links to compare."""


class ConfigError(InfonetError):
    """Malformed run configuration (unknown keys, bad types, missing fields)."""
