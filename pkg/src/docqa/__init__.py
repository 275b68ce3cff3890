"""Content-based question answering over document corpora."""

__version__ = "0.1.0"
