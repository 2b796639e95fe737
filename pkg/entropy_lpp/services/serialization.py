# -*- coding: utf-8 -*-
#
# This file is part of the entropy-lpp package.
#
# entropy-lpp is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

import csv
from decimal import Decimal
import io
import math
from pathlib import Path
from typing import Any, Iterable, Optional

import jsonlines
import numpy as np
import simplejson

from entropy_lpp import __version__
from entropy_lpp.environment import Environment, GENERATOR_ID
from entropy_lpp.errors import EnvironmentFormatError


class SerializationService:
    """Reading and writing environments and experiment output.

    Finite floats are written with 17 significant digits, which round-trips
    every 64-bit float. JSON has no literal for infinities or NaN, so those
    are written as ``null`` (an unreachable count, an infinite budget); CSV
    cells keep Python's ``inf`` and ``nan`` spellings. Output files start
    with a metadata line.
    """

    float_format = ".17g"

    @classmethod
    def _to_decimal(cls, obj: Any) -> Any:
        """Recursively turn floats into ``Decimal`` so simplejson writes them
        verbatim."""
        if isinstance(obj, (float, np.floating)):
            obj = float(obj)
            if not math.isfinite(obj):
                return None
            return Decimal(format(obj, cls.float_format))
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.ndarray):
            return [cls._to_decimal(v) for v in obj.tolist()]
        if isinstance(obj, dict):
            return {str(k): cls._to_decimal(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [cls._to_decimal(v) for v in obj]
        return obj

    @classmethod
    def dumps(cls, obj: Any, indent: Optional[int] = None) -> str:
        return simplejson.dumps(
            cls._to_decimal(obj),
            use_decimal=True,
            indent=indent,
            ignore_nan=True,
        )

    @classmethod
    def format_number(cls, value: Any) -> str:
        if isinstance(value, (float, np.floating)):
            return format(float(value), cls.float_format)
        return "" if value is None else str(value)

    @classmethod
    def metadata(
        cls,
        subcommand: str,
        master_seed: Optional[int],
        params: dict,
    ) -> dict:
        """Everything needed to re-run the producing command."""
        return {
            "version": __version__,
            "generator_id": GENERATOR_ID,
            "master_seed": master_seed,
            "subcommand": subcommand,
            "params": dict(params),
        }

    @classmethod
    def read_environment(cls, path: Path | str) -> Environment:
        """Load an environment document.

        Raises:
            OSError: The file cannot be read.
            EnvironmentFormatError: The document is not valid JSON or
                violates the environment invariants.
        """
        with open(path, "r") as f:
            try:
                data = simplejson.load(f)
            except simplejson.JSONDecodeError as e:
                raise EnvironmentFormatError(
                    f"{path} is not a JSON document: {e}"
                )
        if not isinstance(data, dict):
            raise EnvironmentFormatError(f"{path} must hold a JSON object")
        return Environment.from_dict(data)

    @classmethod
    def render_environment(cls, env: Environment) -> str:
        return cls.dumps(env.to_dict())

    @classmethod
    def render_json(cls, metadata: dict, payload: Any) -> str:
        return cls.dumps({"metadata": metadata, **payload}, indent=2)

    @classmethod
    def render_jsonl(cls, metadata: dict, lines: Iterable[dict]) -> str:
        buffer = io.StringIO()
        with jsonlines.Writer(buffer, dumps=cls.dumps) as writer:
            writer.write({"metadata": metadata})
            writer.write_all(lines)
        return buffer.getvalue()

    @classmethod
    def render_csv(cls, metadata: dict, rows: list[dict]) -> str:
        buffer = io.StringIO()
        buffer.write(f"# {cls.dumps(metadata)}\n")
        fieldnames: list[str] = []
        for row in rows:
            fieldnames.extend(k for k in row if k not in fieldnames)
        writer = csv.DictWriter(
            buffer, fieldnames=fieldnames, lineterminator="\n"
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {k: cls.format_number(row.get(k)) for k in fieldnames}
            )
        return buffer.getvalue()

    @classmethod
    def read_jsonl(cls, path: Path | str) -> tuple[dict, list[dict]]:
        """Split a JSON Lines output file into its metadata and lines."""
        with jsonlines.open(path, loads=simplejson.loads) as reader:
            lines = list(reader)
        if not lines or "metadata" not in lines[0]:
            raise EnvironmentFormatError(f"{path} has no metadata line")
        return lines[0]["metadata"], lines[1:]

    @classmethod
    def write_text(cls, text: str, path: Path | str) -> None:
        Path(path).write_text(text)
