"""Massive-MIMO random-access simulator.

Thin wrapper over the compiled ``_mmra`` extension. Settings passed to
:func:`run` use the same keys as the ``key = value`` config files; booleans
map to on/off and ``None`` to ``auto``.
"""

from ._mmra import (
    bound_table,
    config_keys,
    config_text,
    default_config,
    estimate_contenders,
    gamma_ratio_sq,
    p_res_bound,
    path_gain,
    preset_names,
    run,
    sucre_power,
    tx_power,
    version,
)

__all__ = [
    "bound_table",
    "config_keys",
    "config_text",
    "default_config",
    "estimate_contenders",
    "gamma_ratio_sq",
    "p_res_bound",
    "path_gain",
    "preset_names",
    "run",
    "sucre_power",
    "tx_power",
    "version",
]
