"""
Diversity product bounds verification
"""
