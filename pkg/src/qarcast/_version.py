"""qarcast package version, read by the CLI banner and ``--version``."""

__version__ = "0.1.0"
