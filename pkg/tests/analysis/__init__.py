"""Tests for slopes and continuation."""
