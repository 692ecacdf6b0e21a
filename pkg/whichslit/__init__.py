"""
whichslit - verify, search and simulate non-disturbing which-slit detectors of
incompatible properties in a two-slit interferometer.
"""

__version__ = "0.1.0"

from whichslit.lab import Verification, WhichSlitLab  # noqa: E402

__all__ = ["Verification", "WhichSlitLab", "__version__"]
