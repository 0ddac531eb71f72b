"""Majorana constellations: stellar geometry of symmetric spin states."""
