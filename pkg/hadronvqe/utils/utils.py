import csv
import io
import json
import math
import os
import re
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import yaml

from hadronvqe.config import OutputConfig
from hadronvqe.errors import ParameterError


def parse_grid(gridstr: str) -> list[float]:
    """Parses a grid of values.

    Example:
        0:1:0.25 = [0.0, 0.25, 0.5, 0.75, 1.0]
        0.5,1,2  = [0.5, 1.0, 2.0]

    :param gridstr: `start:stop:step` with stop included, or a comma separated list
    """

    gridstr = gridstr.strip()
    try:
        if ":" not in gridstr:
            values = [float(v) for v in gridstr.split(",") if v.strip()]
        else:
            start, stop, step = (float(v) for v in gridstr.split(":"))
            if step <= 0:
                raise ParameterError(f"grid step must be positive in {gridstr!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            # rounding keeps 0.1 + 2 * 0.1 from printing as 0.30000000000000004
            values = [round(start + i * step, 12) for i in range(count)]
    except ValueError:
        raise ParameterError(f"invalid grid {gridstr!r}") from None

    if not values:
        raise ParameterError(f"empty grid {gridstr!r}")
    return values


def parse_assignments(pairs: Iterable[str]) -> dict[str, Any]:
    """Parses `key=value` pairs, the values read as YAML scalars.

    :param pairs: The pairs, ex: ["n_sites=4", "mode=sampled"]
    """

    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key.strip()):
            raise ParameterError(f"expected key=value, got {pair!r}")
        out[key.strip()] = yaml.safe_load(value) if value.strip() else None
    return out


def format_float(value: Any) -> str:
    """Floats at the configured number of significant digits, other values as text."""

    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{OutputConfig.float_digits}g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def atomic_write(path: Path, text: str) -> None:
    """Writes through a temporary file in the same directory, so a failed
    run never leaves a partial file behind.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temporary = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise


def table_text(rows: Sequence[Mapping[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(row.get(name)) for name in header])
    return buffer.getvalue()


def write_table(path: Path, rows: Sequence[Mapping[str, Any]]) -> tuple[Path, Path]:
    """Writes rows as CSV plus a JSON mirror next to it.

    :param path: The CSV path, the mirror gets the `.json` suffix
    :param rows: One mapping per row, the first row's keys are the header
    """

    path = Path(path)
    mirror = path.with_suffix(".json")
    payload = [{k: _json_value(v) for k, v in row.items()} for row in rows]
    atomic_write(path, table_text(rows))
    atomic_write(mirror, json.dumps(payload, indent=1, allow_nan=False) + "\n")
    return path, mirror


def write_json(path: Path, data: Mapping[str, Any]) -> Path:
    atomic_write(Path(path), json.dumps(data, indent=1, sort_keys=True, default=_json_value) + "\n")
    return Path(path)
