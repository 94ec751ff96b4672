"""Logging, configuration and error handling shared by the prioritizer and the CLI."""
