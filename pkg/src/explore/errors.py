"""Exception hierarchy for the explore engine.

Every error raised by the library derives from ExploreError so callers can
catch engine failures without swallowing programming errors.
"""


class ExploreError(Exception):
    """Base class for all engine errors."""


# --- ingest ---------------------------------------------------------------

class MalformedLineError(ExploreError):
    """A log or CSV line that cannot be parsed (strict mode only)."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class EmptyInputError(ExploreError):
    """An input stream yielded no usable records."""


class VersionMismatchError(ExploreError):
    """A serialized file carries an unsupported magic header or version."""


class CorruptFileError(ExploreError):
    """A serialized file is truncated or internally inconsistent."""


# --- collaborative filtering ----------------------------------------------

class UnknownUserError(ExploreError):
    pass


class UnknownSongError(ExploreError):
    pass


class InsufficientOverlapError(ExploreError):
    """Fewer co-rated songs than the configured minimum overlap."""


class EmptyNeighborhoodError(ExploreError):
    """No candidate user meets the overlap requirement for this user."""


class NoRatingSupportError(ExploreError):
    """No neighbor has rated the requested song."""


# --- matrix factorization --------------------------------------------------

class DivergenceDetectedError(ExploreError):
    """Training error became non-finite; learning rate is too aggressive."""

    def __init__(self, epoch: int, value: float):
        super().__init__(f"training diverged at epoch {epoch} (rmse={value!r})")
        self.epoch = epoch
        self.value = value


# --- explanation ------------------------------------------------------------

class DegenerateDesignError(ExploreError):
    """No usable attribute columns remain after dropping constant ones."""


# --- cold start -------------------------------------------------------------

class NoRepresentativesError(ExploreError):
    """No representative corpus song could be resolved for any seed genre."""


# --- playlist selection -----------------------------------------------------

class ZeroVectorError(ExploreError):
    """A song attribute vector has zero norm; cosine is undefined."""


# --- metrics ---------------------------------------------------------------

class LengthMismatchError(ExploreError):
    pass


class NegativeGainError(ExploreError):
    pass


class NoUsersError(ExploreError):
    pass


class EmptyTestError(ExploreError):
    """A split produced an empty test side."""


# --- service ---------------------------------------------------------------

class ConfigHashMismatchError(ExploreError):
    """Snapshot config hash does not match its recorded configuration."""
