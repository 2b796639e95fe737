#! /usr/bin/env python

"""Solver and experiment configuration.

Allows setting configuration variables either through a mapping handed in by
the caller (typically the ``params`` block of a run config file) or, for the
worker count only, through the ``ELPP_THREADS`` environment variable. Also
provides sane defaults where applicable. Mapping values take precedence over
environment variables.
"""

from dataclasses import dataclass, field
import json
import os
from pathlib import Path
from typing import Any, Mapping, Optional

from entropy_lpp.errors import ConfigError

FULL_FIELD_HARD_LIMIT = 10**8

OUTPUT_FORMATS = ("json", "jsonl", "csv")


class ElppConfig:

    def __init__(self, overrides: Optional[Mapping[str, Any]] = None):
        overrides = dict(overrides or {})
        unknown = [
            k for k in overrides if not k.startswith("ELPP_")
        ]
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")

        self.ELPP_THREADS = int(
            overrides.get(
                "ELPP_THREADS",
                os.environ.get("ELPP_THREADS", 1),
            )
        )
        if self.ELPP_THREADS < 1:
            raise ConfigError("ELPP_THREADS must be at least 1")

        # cap on the point count tracked by the frontier DP
        self.ELPP_K_MAX = overrides.get("ELPP_K_MAX", None)

        self.ELPP_FULL_FIELD_MAX_SITES = int(
            overrides.get("ELPP_FULL_FIELD_MAX_SITES", 10**7)
        )
        if self.ELPP_FULL_FIELD_MAX_SITES > FULL_FIELD_HARD_LIMIT:
            raise ConfigError(
                "ELPP_FULL_FIELD_MAX_SITES may not exceed "
                f"{FULL_FIELD_HARD_LIMIT}"
            )

        self.ELPP_BRUTE_FORCE_MAX = int(
            overrides.get("ELPP_BRUTE_FORCE_MAX", 20)
        )
        self.ELPP_UNIQUENESS_MAX = int(
            overrides.get("ELPP_UNIQUENESS_MAX", 15)
        )
        self.ELPP_VOLUME_MC_MAX_K = int(
            overrides.get("ELPP_VOLUME_MC_MAX_K", 8)
        )
        self.ELPP_MC_BATCH = int(overrides.get("ELPP_MC_BATCH", 100_000))

        self.ELPP_CONVERGENCE_GAMMA = float(
            overrides.get("ELPP_CONVERGENCE_GAMMA", 0.75)
        )
        self.ELPP_BLOWUP_RATIO = float(
            overrides.get("ELPP_BLOWUP_RATIO", 1.5)
        )
        self.ELPP_BLOWUP_CONTROL_BAND = tuple(
            overrides.get("ELPP_BLOWUP_CONTROL_BAND", (0.8, 1.25))
        )
        # largest allowed spread of the rescaled truncation tail medians
        self.ELPP_TRUNCATION_GROWTH = float(
            overrides.get("ELPP_TRUNCATION_GROWTH", 4.0)
        )
        # implementation pin for the Stirling-type volume bound
        self.ELPP_STIRLING_C = float(overrides.get("ELPP_STIRLING_C", 64.0))

        self.ELPP_LOG_LEVEL = overrides.get("ELPP_LOG_LEVEL", "INFO")

    def as_dict(self) -> dict:
        return {
            k: getattr(self, k) for k in dir(self) if k.startswith("ELPP_")
        }


current_config = ElppConfig()


@dataclass
class RunConfig:
    """Typed run configuration loaded from a JSON file.

    The ``subcommand`` is the space-separated command path below the
    ``elpp`` group, e.g. ``"lpp"`` or ``"exp tail"``.
    """

    subcommand: str
    params: dict = field(default_factory=dict)
    master_seed: Optional[int] = None
    output: Optional[str] = None
    format: Optional[str] = None

    ALLOWED_KEYS = ("subcommand", "params", "master_seed", "output", "format")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("run config must be a JSON object")
        unknown = sorted(set(data) - set(cls.ALLOWED_KEYS))
        if unknown:
            raise ConfigError(f"unknown run config keys: {unknown}")
        if "subcommand" not in data:
            raise ConfigError("run config needs a 'subcommand'")
        fmt = data.get("format")
        if fmt is not None and fmt not in OUTPUT_FORMATS:
            raise ConfigError(
                f"format must be one of {OUTPUT_FORMATS}, got {fmt!r}"
            )
        params = data.get("params", {})
        if not isinstance(params, Mapping):
            raise ConfigError("'params' must be a JSON object")
        seed = data.get("master_seed")
        if seed is not None and (
            not isinstance(seed, int) or seed < 0 or seed >= 2**64
        ):
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        return cls(
            subcommand=str(data["subcommand"]).strip(),
            params=dict(params),
            master_seed=seed,
            output=data.get("output"),
            format=fmt,
        )

    def command_path(self) -> list[str]:
        return self.subcommand.split()

    def flat_defaults(self) -> dict:
        """Parameter mapping with the top-level run keys folded in.

        Keys use click's parameter names (underscores).
        """
        merged = {k.replace("-", "_"): v for k, v in self.params.items()}
        if self.master_seed is not None:
            merged.setdefault("seed", self.master_seed)
        if self.output is not None:
            merged.setdefault("output", self.output)
        if self.format is not None:
            merged.setdefault("fmt", self.format)
        return merged


def load_run_config(path: Path | str) -> RunConfig:
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    return RunConfig.from_dict(data)
