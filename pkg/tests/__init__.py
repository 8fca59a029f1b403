"""Unit and integration tests for the outage toolkit."""
