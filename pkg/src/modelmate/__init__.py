"""Assistant for completing UML-style domain models with LLM suggestions."""

__version__ = "0.1.0"
