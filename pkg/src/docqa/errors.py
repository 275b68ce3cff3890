"""Exception types shared across the package."""


class DocqaError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(DocqaError):
    """Malformed corpus file, duplicate ids, or metadata conflicts."""


class DatasetError(DocqaError):
    """Malformed dataset file, unresolved doc ids, or bad gold spans."""


class FilterError(DocqaError):
    """Metadata filter referencing unknown fields or mismatched kinds."""


class ModelError(DocqaError):
    """Model snapshot version/shape mismatches or untrainable reader kinds."""


class NoCandidateDocumentsError(DocqaError):
    """A metadata filter eliminated every document before retrieval."""
