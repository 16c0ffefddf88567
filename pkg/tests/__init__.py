"""
Test suite for Konductor.
"""
