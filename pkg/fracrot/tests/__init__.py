"""Unit tests for fracrot."""
