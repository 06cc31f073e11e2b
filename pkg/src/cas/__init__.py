"""Natural-language command to human-like robot action sequences, with an
evaluation harness comparing generated sequences to hand-made references."""

__version__ = "0.1.0"
