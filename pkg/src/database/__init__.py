"""
Run archive database module
"""
