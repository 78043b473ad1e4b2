"""faultline: IR-based fault localization with LLM-built entity queries."""

__version__ = "0.1.0"
