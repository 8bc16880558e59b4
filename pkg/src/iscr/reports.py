"""Deterministic CSV / markdown report tables and the on-disk report bundle."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

FORMATS = ("csv", "md")


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if x != x:
            return "nan"
        return f"{x:.10g}"
    return str(x)


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"table {self.name}: row width {len(row)} != {len(self.columns)}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(x) for x in row])
        return buf.getvalue()

    def to_markdown(self) -> str:
        def cell(x):
            return format_value(x).replace("|", "\\|")
        lines = ["| " + " | ".join(self.columns) + " |",
                 "|" + "|".join("---" for _ in self.columns) + "|"]
        lines += ["| " + " | ".join(cell(x) for x in row) + " |" for row in self.rows]
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "md":
            return f"## {self.name}\n\n" + self.to_markdown()
        raise ValueError(f"unknown format {fmt!r}")


@dataclass(frozen=True)
class ReportBundle:
    command: str
    version: str
    seed: int
    scenario_name: str
    scenario_digest: str
    tables: tuple[Table, ...]
    summary: tuple[str, ...] = field(default=())

    def metadata(self, fmt: str) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "scenario": self.scenario_name,
            "scenario_sha256": self.scenario_digest,
            "format": fmt,
            "tables": [f"{t.name}.{fmt}" for t in self.tables],
        }

    def summary_text(self) -> str:
        return "".join(line + "\n" for line in self.summary)

    def write(self, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
        """Write every table plus ``run.json`` and ``summary.txt``; byte-identical
        for identical inputs."""
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for table in self.tables:
            path = out / f"{table.name}.{fmt}"
            path.write_text(table.render(fmt), encoding="utf-8", newline="\n")
            written.append(path)
        meta = out / "run.json"
        meta.write_text(json.dumps(self.metadata(fmt), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8", newline="\n")
        summary = out / "summary.txt"
        summary.write_text(self.summary_text(), encoding="utf-8", newline="\n")
        return written + [meta, summary]
