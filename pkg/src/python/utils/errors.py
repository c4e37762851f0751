"""
Error hierarchy for the word spotting system
Every domain, I/O and format failure raised by the package derives from WordSpotError
"""


class WordSpotError(Exception):
    """Base class for all errors raised by the package"""


class ConfigError(WordSpotError):
    """Invalid configuration or command-line usage"""


class IoError(WordSpotError, OSError):
    """File could not be read or written"""


# --- phoc / lexicon ---------------------------------------------------------

class EmptyWord(WordSpotError, ValueError):
    """Word has no alphabet characters after canonicalization"""


class EmptyLexicon(WordSpotError, ValueError):
    """Lexicon has no entries"""


# --- corpus -----------------------------------------------------------------

class MalformedImage(WordSpotError, ValueError):
    """Image file exists but is not a valid 8-bit grayscale PGM"""


class ManifestError(WordSpotError, ValueError):
    """Manifest line or path is invalid"""


class EmptyCorpus(WordSpotError, ValueError):
    """No images available"""


# --- synth ------------------------------------------------------------------

class MissingGlyph(WordSpotError, ValueError):
    """Glyph set has no strokes for a symbol of the word"""


# --- estimator --------------------------------------------------------------

class BadArchitecture(WordSpotError, ValueError):
    """Architecture descriptor is inconsistent"""


class GeometryMismatch(WordSpotError, ValueError):
    """Image size differs from the model input geometry"""


class LengthMismatch(WordSpotError, ValueError):
    """Vectors of different lengths"""


class ShapeMismatch(WordSpotError, ValueError):
    """Parameter and gradient shapes disagree"""


class EmptyDataset(WordSpotError, ValueError):
    """Training set is empty"""


class ModelFormatError(WordSpotError, ValueError):
    """Model file has a bad magic number or an inconsistent payload"""


class VersionMismatch(ModelFormatError):
    """Model file format version is not supported"""


class ChecksumMismatch(ModelFormatError):
    """Model file payload does not match its checksum"""


# --- confidence / spotting --------------------------------------------------

class ZeroVector(WordSpotError, ValueError):
    """Cosine dissimilarity is undefined for a zero vector"""


class MixedMeasures(WordSpotError, ValueError):
    """Confidence scores from different measures cannot be ranked together"""


class EmptyGallery(WordSpotError, ValueError):
    """Retrieval gallery is empty"""


class NoRelevant(WordSpotError, ValueError):
    """Average precision requested for a list without relevant items"""


class NoQueries(WordSpotError, ValueError):
    """Evaluation protocol produced no valid query"""
