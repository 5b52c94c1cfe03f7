"""
Exception hierarchy for the summix package
Validation problems subclass ValueError, file problems subclass OSError
"""


class SummixError(Exception):
    """Base class for every error raised by summix"""


class ValidationError(SummixError, ValueError):
    """Invalid input, shape or configuration (CLI exit code 2)"""


class ShapeError(ValidationError):
    """Array dimensions do not agree"""


class PrecisionError(ValidationError):
    """Invalid precision policy"""


class ConfigurationError(ValidationError):
    """Invalid encoder, transducer, benchmark or runtime configuration"""


class MaskError(ValidationError):
    """Invalid chunk specification or visibility mask"""


class ContextMismatchError(ValidationError):
    """Streaming context used with a configuration it was not built for"""


class StreamStateError(ValidationError):
    """Streaming call out of sequence (empty chunk, chunk after the final one)"""


class TargetError(ValidationError):
    """Invalid transducer target or token sequence"""


class BenchmarkError(ValidationError):
    """Benchmark run could not produce valid measurements"""


class TimerResolutionError(BenchmarkError):
    """Measured interval too short for the platform timer"""


class SummixIOError(SummixError, OSError):
    """File could not be read or written (CLI exit code 3)"""


class BinaryFormatError(SummixIOError):
    """Binary feature or checkpoint file is malformed"""


class BadMagicError(BinaryFormatError):
    """File does not start with the expected magic bytes"""


class UnsupportedVersionError(BinaryFormatError):
    """File format version is not supported"""


class TruncatedFileError(BinaryFormatError):
    """File ended before the declared content"""


class FileWriteError(SummixIOError):
    """Feature, checkpoint or report file could not be written"""


class ReportWriteError(FileWriteError):
    """Report could not be written to the requested path"""
