"""Post-training process-mining analytics for supervised CTF exercises."""

__version__ = "0.1.0"
