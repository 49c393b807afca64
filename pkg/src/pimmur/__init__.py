"""Multi-agent social simulation with minimal-control prompts and an instruction audit toolkit."""

__version__ = "0.1.0"
