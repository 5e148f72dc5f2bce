"""Compiler for a small neural-network specification language."""

from __future__ import annotations

__version__ = "0.1.0"
