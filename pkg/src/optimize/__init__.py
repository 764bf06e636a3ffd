"""
Constellation search procedures
"""
