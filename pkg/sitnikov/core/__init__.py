"""
Core numerics and domain models: integration, Kepler's equation, Hill theory.
"""
