"""
Configuration module for whichslit.
"""

from whichslit.config.config_manager import ConfigManager

# Create a global config manager instance
config = ConfigManager()

__all__ = ["ConfigManager", "config"]
