"""Compile-time simplification of classically controlled operations in dynamic circuits."""

__version__ = "0.1.0"
