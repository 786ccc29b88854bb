"""Tabular report emission (CSV with a ``#`` provenance header, or JSON)."""

from __future__ import annotations

import csv
import hashlib
import json
from collections.abc import Iterable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import IO, Any

from . import __version__

SIGNIFICANT_DIGITS = 12


def number(x: Any) -> Any:
    """Render a rational/float for output; other values pass through."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, (Fraction, float)):
        f = float(x)
        if f.is_integer():
            return int(f)
        return float(format(f, f".{SIGNIFICANT_DIGITS}g"))
    return x


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(command: str, config: dict[str, Any], inputs: dict[str, str | Path]) -> dict[str, Any]:
    """Tool version, input hashes and the echoed configuration (no timestamps)."""
    return {
        "tool": "fraccount",
        "version": __version__,
        "command": command,
        "inputs": {name: {"file": Path(p).name, "sha256": file_sha256(p)} for name, p in sorted(inputs.items())},
        "config": config,
    }


def _cell(v: Any) -> str:
    v = number(v)
    if v is None:
        return ""
    return str(v)


def write_table(
    fh: IO[str],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    prov: dict[str, Any] | None,
    fmt: str = "csv",
) -> None:
    if fmt == "json":
        doc = {
            "provenance": prov,
            "columns": list(columns),
            "rows": [dict(zip(columns, (number(v) for v in row))) for row in rows],
        }
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
        return
    if prov is not None:
        for line in json.dumps(prov, indent=1, sort_keys=True).splitlines():
            fh.write(f"# {line}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def read_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Read back a CSV report, skipping the provenance header."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]
