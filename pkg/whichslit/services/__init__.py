"""
Interference-lab services: screen model, screen statistics, sampling and CSV export.
"""

from whichslit.services.distributions import (
    JointDistribution,
    SplitState,
    classical_distribution,
    conditional_screen,
    interference_term,
    joint_outcome_distribution,
    screen_distribution,
    selected_distribution,
    split_state,
)
from whichslit.services.sampler import SampleResult, sample_runs
from whichslit.services.screen import SCREEN_KINDS, ScreenModel, build_screen

__all__ = [
    "JointDistribution",
    "SCREEN_KINDS",
    "SampleResult",
    "ScreenModel",
    "SplitState",
    "build_screen",
    "classical_distribution",
    "conditional_screen",
    "interference_term",
    "joint_outcome_distribution",
    "sample_runs",
    "screen_distribution",
    "selected_distribution",
    "split_state",
]
