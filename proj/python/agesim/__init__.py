"""Bit-accurate aging simulator for SRAM weight memories.

The heavy lifting lives in the compiled `_core` extension; this package
adds a dict-in / dict-out wrapper around the JSON run interface.
"""

import json as _json

from ._core import (
    __version__,
    bit_probabilities,
    deviation_curve,
    p_at_least_n,
    p_duty_deviation,
    run_json,
    snm_degradation,
)

__all__ = [
    "__version__",
    "bit_probabilities",
    "deviation_curve",
    "p_at_least_n",
    "p_duty_deviation",
    "run",
    "run_json",
    "snm_degradation",
]


def run(config, base_dir="."):
    """Run one simulation from a config dict; returns the summary dict.

    Relative paths inside the config (manifest, snm curve_csv) resolve
    against base_dir.
    """
    return _json.loads(run_json(_json.dumps(config), base_dir))
