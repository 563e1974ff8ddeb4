"""Turn prose hardening guides into verified, executable policy plans."""

__version__ = "0.1.0"
