"""Bundled demo graphs."""
