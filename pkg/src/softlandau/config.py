"""Flat JSON configuration files.

Keys are the fields of :class:`SimulationConfig`.  ``ic`` is either the name
of a shipped initial condition or a dict ``{"kind": ..., **params}``.
Values given as ``overrides`` (the CLI flags) replace file values, which
replace the defaults.
"""

import json
from dataclasses import fields

from .initial import InitialConditionSpec, shipped
from .integrator import ConfigError, SimulationConfig

FIELDS = {f.name for f in fields(SimulationConfig)}
# keys echoed by SimulationConfig.to_dict that are derived, not settable
DERIVED = {"q"}


def resolve_ic(value):
    if isinstance(value, InitialConditionSpec):
        return value
    if isinstance(value, str):
        try:
            return shipped(value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if isinstance(value, dict):
        try:
            return InitialConditionSpec.from_dict(value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"ic must be a shipped name or a dict, got {type(value).__name__}")


def make_config(values):
    """Validated :class:`SimulationConfig` from a flat mapping."""
    values = {k: v for k, v in values.items() if k not in DERIVED}
    unknown = set(values) - FIELDS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    if "ic" in values:
        values["ic"] = resolve_ic(values["ic"])
    if "s_list" in values:
        values["s_list"] = tuple(float(s) for s in values["s_list"])
    try:
        return SimulationConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path=None, overrides=None):
    """Read ``path`` (flat JSON; may be None) and apply ``overrides``."""
    values = {}
    if path is not None:
        with open(path) as fh:
            try:
                values = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: expected a flat JSON object")
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return make_config(values)
