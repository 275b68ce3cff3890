"""Two-stage pipeline: configured engine, HTTP service, command line."""

from .cli import build_parser, main
from .engine import MODES, READER_KINDS, AskResponse, Engine, SystemConfig, load_system_config
from .service import build_filter, create_app, render_schema

__all__ = [
    "MODES",
    "READER_KINDS",
    "AskResponse",
    "Engine",
    "SystemConfig",
    "build_filter",
    "build_parser",
    "create_app",
    "load_system_config",
    "main",
    "render_schema",
]
