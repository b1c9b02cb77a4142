"""User-facing surfaces. ``plots`` imports PySide6, so it is not imported here."""
from .cli import build_parser, main

__all__ = ['build_parser', 'main']
