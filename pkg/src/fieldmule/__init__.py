"""Deterministic simulator and protocol library for battery-free
soil-moisture sensor networks collected by a mobile data-mule gateway."""

__version__ = "0.1.0"
