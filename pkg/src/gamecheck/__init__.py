"""Agent-based testing of grid games: goal generation, play, and a model-based oracle."""

__version__ = "0.1.0"
