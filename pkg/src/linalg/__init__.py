"""
Complex matrix primitives
"""
