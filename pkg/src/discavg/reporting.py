"""Structured output: CSV/JSON writers and run manifests.

CSV is locale-free by construction: '.' decimal point, LF line endings,
header row, floats rendered with repr (shortest round-trip), so fixture
comparisons can be bit-exact.  Every file written by the CLI gets a
sidecar ``<name>.manifest.json`` recording the subcommand, the fully
resolved parameter set, the tool version and a timestamp; re-running the
manifest's parameters reproduces the output bit-identically (the
timestamp lives only in the manifest, never in the output).
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

TOOL_VERSION = "0.1.0"


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path: str | Path | None, text: str) -> None:
    """Write to a file, or stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_json(path: str | Path | None, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    write_text(path, text)


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    parameters: dict
    tool_version: str = TOOL_VERSION
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


def write_manifest(output_path: str | Path, manifest: RunManifest) -> Path:
    """Sidecar manifest next to an output file."""
    side = Path(str(output_path) + ".manifest.json")
    side.write_text(
        json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8", newline="\n"
    )
    return side


def load_config(path: str | Path) -> dict[str, str]:
    """Flat key=value config file; '#' starts a comment, blank lines skipped."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
