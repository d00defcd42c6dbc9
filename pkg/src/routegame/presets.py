"""Built-in run configurations.

Each preset is a complete configuration dictionary in the same schema
accepted from config files, so ``--preset NAME`` and ``--config FILE``
share one parser.  ``fig1`` through ``fig6`` cover the routing-game
benchmark runs on three parallel edges; the two ``reliability*``
presets use a cyclic-averaging control matrix that cannot hold every
steady state, which makes the horizon length matter.
"""

from __future__ import annotations

import copy
from typing import Any, Dict, Sequence

from .exceptions import ConfigError

__all__ = ["PRESET_NAMES", "get_preset"]


def _run(
    slopes: Sequence[float],
    A: Any,
    gamma: float,
    x0: Sequence[float],
    horizon: int = 15,
    B: Any = "identity",
) -> Dict[str, Any]:
    return {
        "network": {"edges": [{"a": float(a), "b": 0.0} for a in slopes]},
        "dynamics": {"gamma": gamma, "A": A, "B": B},
        "cost": {"kind": "social_welfare"},
        "horizon": horizon,
        "x0": [float(v) for v in x0],
        "mode": "mpc",
        "seed": 0,
    }


# Columns sum to one: mass leaving edge e is split between e and its
# cyclic successor, so not every simplex point is reachable in one step.
_CYCLIC_B = [
    [0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
]

_PRESETS: Dict[str, Dict[str, Any]] = {
    "fig1": _run((1.0, 1.0, 1.0), "uniform", 0.5, (0.3, 0.5, 0.2)),
    "fig2": _run((1.0, 1.0, 1.0), "identity", 0.5, (0.3, 0.5, 0.2)),
    "fig3": _run((1.0, 2.0, 4.0), "uniform", 0.5, (0.3, 0.5, 0.2)),
    "fig4": _run((1.0, 2.0, 4.0), "identity", 0.5, (0.3, 0.5, 0.2)),
    "fig5": _run((1.0, 2.0, 4.0), "identity", 0.5, (0.0, 1.0, 0.0)),
    "fig6": _run((1.0, 2.0, 4.0), "identity", 0.7, (0.3, 0.2, 0.5)),
    "reliability15": _run(
        (1.0, 2.0, 4.0), "identity", 0.6, (0.3, 0.5, 0.2), horizon=15, B=_CYCLIC_B
    ),
    "reliability35": _run(
        (1.0, 2.0, 4.0), "identity", 0.6, (0.3, 0.5, 0.2), horizon=35, B=_CYCLIC_B
    ),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def get_preset(name: str) -> Dict[str, Any]:
    """Return a deep copy of the named configuration dictionary."""
    try:
        preset = _PRESETS[name]
    except KeyError:
        known = ", ".join(PRESET_NAMES)
        raise ConfigError(f"unknown preset {name!r} (known: {known})") from None
    return copy.deepcopy(preset)
