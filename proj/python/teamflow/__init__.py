"""Bot detection, team sequences and contrast motifs over event streams."""

import json

from ._core import (
    TeamflowError,
    __version__,
    contains_bot,
    discover,
    f1_from,
    mann_whitney_u,
    motif_distance,
    proportions,
)
from ._core import run_pipeline as _run_pipeline


def run_pipeline(config, output_dir=None):
    """Run every stage and return the report as a dict."""
    return json.loads(_run_pipeline(str(config), "" if output_dir is None else str(output_dir)))


__all__ = [
    "TeamflowError",
    "__version__",
    "contains_bot",
    "discover",
    "f1_from",
    "mann_whitney_u",
    "motif_distance",
    "proportions",
    "run_pipeline",
]
