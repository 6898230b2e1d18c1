"""Deterministic, machine-readable output: CSV, JSON and run manifests.

Floats are written with Python's shortest round-trip representation
(repr), so CSV/JSON outputs are byte-stable and parse back exactly.  Every
CLI run writes a manifest listing its outputs beside them; the manifest
carries wall time and is the one file excluded from the byte-identical
reproducibility guarantee.
"""

import json
import time
from dataclasses import dataclass, field

SCHEMA_VERSION = "1.0"


def format_value(value):
    """Shortest round-trip text for one CSV cell."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, int):
        return str(value)
    return str(value)


def write_csv(path, header, rows):
    """Write rows with a fixed column order and round-trip float format."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class RunManifest:
    """Record of one CLI invocation and the files it produced."""

    command: list
    seed: int = None
    config: dict = None
    outputs: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION
    tool_version: str = ""
    wall_time_s: float = 0.0
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def add_output(self, path):
        self.outputs.append(str(path))

    def write(self, path):
        from . import __version__

        self.tool_version = self.tool_version or __version__
        self.wall_time_s = time.perf_counter() - self._started
        write_json(
            path,
            {
                "command": list(self.command),
                "seed": self.seed,
                "config": self.config,
                "outputs": list(self.outputs),
                "schema_version": self.schema_version,
                "tool_version": self.tool_version,
                "wall_time_s": self.wall_time_s,
            },
        )
