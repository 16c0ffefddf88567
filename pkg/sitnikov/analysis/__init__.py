"""
Trace slopes, A_n integrals and continuation in eccentricity.
"""
