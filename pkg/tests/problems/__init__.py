"""Tests for the circular and elliptic problems."""
