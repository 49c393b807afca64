"""Settings, logging, tracing, and run-directory storage."""
