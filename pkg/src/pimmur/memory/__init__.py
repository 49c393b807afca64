"""Per-agent memory stores."""
