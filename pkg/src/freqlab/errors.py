"""Shared exception types mapped to CLI exit codes."""

__all__ = ["ConfigError", "DivergenceError"]


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration (exit code 2)."""


class DivergenceError(RuntimeError):
    """Training produced non-finite values (exit code 3)."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite values at step {step}")
