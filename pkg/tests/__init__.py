"""
Test package for ratnet.
"""
