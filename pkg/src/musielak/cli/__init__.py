"""Command-line interface and INI run configurations."""

from .config import Expression, RunConfig, load_config
from .main import build_parser, main

__all__ = ["Expression", "RunConfig", "build_parser", "load_config", "main"]
