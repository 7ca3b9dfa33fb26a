"""wordswarm: streaming-text visualization with distance-driven word agents."""

__version__ = "0.1.0"
