"""Multi-period prediction markets driven by risk-measure agents.

The heavy lifting lives in the compiled extension; this package re-exports
its public names and adds a small convenience wrapper for running markets
from python dictionaries.
"""

import json as _json

from ._riskmarket import *  # noqa: F401,F403
from ._riskmarket import __all__ as _core_all
from ._riskmarket import preset_config, run_config_json

__all__ = list(_core_all) + ["run", "run_preset"]


def run(config):
    """Run a market from a config dict (or JSON text).

    Returns (summary, trace, final_inventory): the summary dict, a dict of
    per-round numpy arrays, and the final share inventory.
    """
    if not isinstance(config, str):
        config = _json.dumps(config)
    return run_config_json(config)


def run_preset(name, seed=None, max_rounds=None, eps=None):
    """Run a built-in preset, optionally overriding seed or stop rule."""
    config = _json.loads(preset_config(name) if seed is None else preset_config(name, seed))
    if max_rounds is not None:
        config["stop"]["max_rounds"] = max_rounds
    if eps is not None:
        config["stop"]["eps"] = eps
    return run(config)
