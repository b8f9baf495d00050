"""Run configuration with flag > environment > config file > default precedence."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields


@dataclass
class Config:
    q_max: int = 5
    w_order: int = 8
    surface_model: str = "k3-rank24"
    conja_mode: str = "sampled"
    cache_dir: str = ""
    output: str = "pretty"
    long_checks: bool = False

    @classmethod
    def load(cls, flag_values=None, env=None, config_path=None):
        env = os.environ if env is None else env
        values = {}
        path = config_path or env.get("HILBK3_CONFIG") or ""
        if path and os.path.exists(path):
            with open(path) as fh:
                for k, v in json.load(fh).items():
                    values[k] = v
        for f in fields(cls):
            env_key = f"HILBK3_{f.name.upper()}"
            if env_key in env:
                raw = env[env_key]
                values[f.name] = (
                    raw if f.type == "str" else
                    raw.lower() in ("1", "true", "yes") if f.type == "bool" else int(raw)
                )
        if flag_values:
            for k, v in flag_values.items():
                if v is not None:
                    values[k] = v
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)
