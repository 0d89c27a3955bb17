"""Error taxonomy.

Two categories drive every outward surface: ConfigError means the caller
asked for something incoherent (bad method name, empty label side, malformed
config) and maps to CLI exit 2 / HTTP 400; DataError means the inputs
themselves are unusable (corrupt file, missing embedding, non-finite values)
and maps to CLI exit 3 / HTTP 422.
"""


class OodScoreError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(OodScoreError):
    """The request or configuration is invalid."""


class DataError(OodScoreError):
    """The input data is invalid or unusable."""


# -- vectors and similarity ------------------------------------------------

class ZeroNorm(DataError):
    """Vector norm too small to normalize."""


class NonFinite(DataError):
    """NaN or Inf encountered where finite values are required."""


class DimensionMismatch(DataError):
    """Vectors of different dimension were combined."""


# -- embedding interchange files -------------------------------------------

class BadMagic(DataError):
    """File does not start with the expected magic bytes."""


class VersionUnsupported(DataError):
    """File declares a format version this reader does not support."""


class TruncatedPayload(DataError):
    """File payload or sidecar is shorter (or longer) than the header claims."""


class DuplicateId(DataError):
    """Two records in one store share an id."""


# -- label sets --------------------------------------------------------------

class MissingTextEmbedding(DataError):
    """A prompt string has no embedding in the supplied lookup."""


class BadPromptTemplate(ConfigError):
    """A prompt template contains more than one placeholder."""


# -- scoring -----------------------------------------------------------------

class EmptyInSet(ConfigError):
    """A score was requested with no in-domain labels."""


class EmptyOutSet(ConfigError):
    """A score requiring OOD labels was requested with none configured."""


class UnknownMethod(ConfigError):
    """Scoring method name not recognised."""


class MissingScore(DataError):
    """A scored record lacks the method an evaluation task asks for."""


# -- bounding boxes ----------------------------------------------------------

class LabelOrderMismatch(DataError):
    """Box label order does not partition into the label set's in/out names."""


class TooFewBoxes(DataError):
    """A mixture score needs at least two per-box scores."""


# -- evaluation ---------------------------------------------------------------

class EmptyList(DataError):
    """AUROC needs at least one score on each side."""


class UnknownSplit(DataError):
    """An evaluation task names a split absent from the scored records."""


class UnlabeledImage(DataError):
    """A mixture result has no ground-truth label."""


# -- synthetic generation ------------------------------------------------------

class BadConfig(ConfigError):
    """Synthetic-generator configuration is invalid."""
