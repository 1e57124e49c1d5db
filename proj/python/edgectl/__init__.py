"""Python access to the edgectl simulation core."""

from ._edgectl import (
    ConfigError,
    EdgeStateError,
    NumericalError,
    concurrence,
    config_keys,
    evolve,
    format_number,
    spectrum,
    sweep,
    wootters_concurrence,
)

__all__ = [
    "ConfigError",
    "EdgeStateError",
    "NumericalError",
    "concurrence",
    "config_keys",
    "evolve",
    "format_number",
    "spectrum",
    "sweep",
    "wootters_concurrence",
]
