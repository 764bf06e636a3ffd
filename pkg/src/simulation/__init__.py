"""
Monte-Carlo channel simulation
"""
