"""
Constellation representations, generator structures and builtins
"""
