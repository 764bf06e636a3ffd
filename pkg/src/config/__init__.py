"""
Configuration module
"""
