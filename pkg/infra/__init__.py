"""Error handling and result persistence."""
