"""Tests for report writers."""
