"""Exception types raised by the library."""


class SlimError(Exception):
    """Base class for every error raised on purpose by slimgraph."""


class GraphError(SlimError, ValueError):
    """Invalid graph input: bad endpoint, self-loop, duplicate arc, parse failure."""


class DecodeError(SlimError):
    """An archive or bit region could not be decoded."""


class HeaderError(DecodeError):
    """Bad magic, unsupported version, or inconsistent archive header."""


class TruncatedError(DecodeError):
    """A read ran past the end of the available bits."""


class CodebookError(DecodeError):
    """A leaf code is not present in the codebook."""


class FormatError(DecodeError):
    """Structurally invalid content inside an otherwise readable region."""


class SectionError(SlimError):
    """A query needs a section the archive does not contain."""


class PartitionError(SlimError):
    """No strategy produced a partition meeting its contract."""
