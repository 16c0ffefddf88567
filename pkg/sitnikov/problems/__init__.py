"""
Equations of motion of the circular and elliptic problems.
"""
