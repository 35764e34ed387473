"""Rubric-guided LLM-as-a-judge harness for program-repair patch evaluation."""

__version__ = "0.1.0"
