"""Sweep table serialisation.

CSV files start with one ``# {json metadata}`` comment line followed by the
header row. JSON files hold ``{"metadata": ..., "rows": [...]}``. Floats are
written in shortest round-trip form, so parsing an emitted file gives back
the exact table.
"""
from __future__ import annotations

import io
import json
import math
from typing import Any, Optional

import pandas as pd

from producer_scrounger.core.errors import ConfigError
from producer_scrounger.core.models import (
    SWEEP_COLUMNS,
    EssClassification,
    SweepRow,
    SweepTable,
)

FORMATS = ("csv", "json", "markdown")


def _shortest(value: float) -> str:
    return repr(float(value))


def format_output(table: SweepTable, fmt: str) -> str:
    """Render a sweep table as csv, json or markdown."""
    if fmt == "csv":
        header = "# " + json.dumps(table.metadata, sort_keys=True)
        body = table.dataframe.to_csv(index=False, float_format=_shortest, lineterminator="\n")
        return f"{header}\n{body}"

    elif fmt == "json":
        rows = [dict(zip(table.columns, values)) for values in zip(*(table.column(c) for c in table.columns))]
        return json.dumps({"metadata": table.metadata, "rows": rows}, indent=2)

    elif fmt == "markdown":
        parts = [f"## {table.metadata.get('game', 'sweep')}", ""]
        parts.append(table.dataframe.to_markdown(index=False, floatfmt=".10g"))
        parts.append("")
        return "\n".join(parts)

    else:
        raise ConfigError(f"Unknown format: {fmt}")


def _optional(value: Any) -> Optional[float]:
    if value is None:
        return None
    out = float(value)
    return None if math.isnan(out) else out


def _row(record: dict[str, Any], second_name: Optional[str]) -> SweepRow:
    return SweepRow(
        gamma=float(record["gamma"]),
        classification=EssClassification(record["classification"]),
        p_star=_optional(record.get("p_star")),
        pi_star=_optional(record.get("pi_star")),
        total_production=_optional(record.get("total_production")),
        second=_optional(record.get(second_name)) if second_name else None,
    )


def _second_name(columns: list[str]) -> Optional[str]:
    extra = [c for c in columns if c not in SWEEP_COLUMNS]
    if len(extra) > 1:
        raise ConfigError(f"unexpected columns: {extra}")
    return extra[0] if extra else None


def parse_output(text: str, fmt: str) -> SweepTable:
    """Read back a table written by ``format_output`` (csv or json)."""
    if fmt == "csv":
        first, _, rest = text.partition("\n")
        if not first.startswith("# "):
            raise ConfigError("CSV sweep files start with a '# {metadata}' line")
        metadata = json.loads(first[2:])
        df = pd.read_csv(
            io.StringIO(rest),
            float_precision="round_trip",
            dtype={"classification": str},
        )
        second = _second_name(list(df.columns))
        records = df.astype(object).where(df.notna(), None).to_dict(orient="records")

    elif fmt == "json":
        data = json.loads(text)
        metadata = data["metadata"]
        records = data["rows"]
        second = _second_name(list(records[0])) if records else None

    else:
        raise ConfigError(f"cannot parse format: {fmt}")

    rows = tuple(_row(record, second) for record in records)
    return SweepTable(rows=rows, metadata=metadata, second_name=second)


def format_rich_table(table: SweepTable) -> None:
    """Display a sweep on the console."""
    from rich.console import Console
    from rich.table import Table as RichTable

    console = Console()
    rich_table = RichTable(
        title=str(table.metadata.get("game", "sweep")),
        show_header=True,
        header_style="bold cyan",
        border_style="blue",
        title_style="bold magenta",
    )
    for col in table.columns:
        rich_table.add_column(col, overflow="fold")
    for values in zip(*(table.column(c) for c in table.columns)):
        rich_table.add_row(
            *["" if v is None else (f"{v:.10g}" if isinstance(v, float) else str(v)) for v in values]
        )
    console.print(rich_table)
