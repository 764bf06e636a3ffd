"""
Diversity metrics and diversity functions
"""
