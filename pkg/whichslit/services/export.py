"""CSV export of screen distributions and joint cavity × bin tables."""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from whichslit.services.distributions import JointDistribution

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

DISTRIBUTION_COLUMNS = ["bin", "p_quantum", "p_classical", "cross_term", "p_selected_Y", "p_selected_T"]
JOINT_COLUMNS = ["cavity", "bin", "probability", "count"]


def distribution_frame(
    p_quantum: np.ndarray,
    p_classical: np.ndarray,
    cross_term: np.ndarray,
    p_selected_y: np.ndarray,
    p_selected_t: np.ndarray,
) -> pd.DataFrame:
    frame = pd.DataFrame(
        {
            "bin": np.arange(len(p_quantum)),
            "p_quantum": p_quantum,
            "p_classical": p_classical,
            "cross_term": cross_term,
            "p_selected_Y": p_selected_y,
            "p_selected_T": p_selected_t,
        }
    )
    return frame[DISTRIBUTION_COLUMNS]


def joint_frame(joint: JointDistribution, counts: Optional[np.ndarray] = None) -> pd.DataFrame:
    """One row per (cavity, bin); ``count`` is empty when no sample was drawn."""
    n_cavities, n_bins = joint.probabilities.shape
    frame = pd.DataFrame(
        {
            "cavity": np.repeat(list(joint.cavities), n_bins),
            "bin": np.tile(np.arange(n_bins), n_cavities),
            "probability": joint.probabilities.ravel(),
        }
    )
    if counts is None:
        frame["count"] = pd.array([pd.NA] * len(frame), dtype="Int64")
    else:
        frame["count"] = pd.array(np.asarray(counts).ravel(), dtype="Int64")
    return frame[JOINT_COLUMNS]


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %d rows to %s", len(frame), target)
    return target
