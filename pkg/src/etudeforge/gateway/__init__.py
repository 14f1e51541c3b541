"""Service layer: persistence, background analysis, HTTP API, CLI."""
