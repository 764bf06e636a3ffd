"""
Unitary Space-Time Constellation Designer - Main Package
"""

__version__ = "1.0.0"
__author__ = "Constellation Design Team"
