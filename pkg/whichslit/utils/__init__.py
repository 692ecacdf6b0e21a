"""
Utility modules for whichslit.
"""

from whichslit.utils.cache import Cache

__all__ = ["Cache"]
