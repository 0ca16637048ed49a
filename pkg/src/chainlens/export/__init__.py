"""Export utilities."""

from .svg import RadarExporter

__all__ = ["RadarExporter"]
