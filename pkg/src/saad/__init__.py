"""Toolkit for detecting, classifying and measuring self-admitted aging
debt in source-code comments."""

__version__ = "0.1.0"
