"""
Command-line commands and table output
"""
