"""Domain types, configuration, and the simulation engine."""
