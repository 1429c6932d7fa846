"""
Exported parameters
"""

__version__ = "0.3.0"
