"""scamscan: detection and measurement toolkit for technical-support-scam pages."""

__version__ = "0.1.0"
