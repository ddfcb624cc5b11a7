"""Psychology-informed mistake and correction injection for procedural
step traces, with validation, edit-window planning, and rubric analytics."""

__version__ = "0.1.0"
