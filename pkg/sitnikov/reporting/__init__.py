"""
Serializers for result rows.
"""
