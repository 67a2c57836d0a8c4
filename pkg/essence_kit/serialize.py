# essence_kit/serialize.py
"""Deterministic JSON output and rich text tables."""
from __future__ import annotations

import orjson
from rich.console import Console
from rich.table import Table

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


def dumps(obj) -> bytes:
    return orjson.dumps(obj, option=JSON_OPTIONS)


def render_json(obj) -> str:
    return dumps(obj).decode("utf-8")


def table(title: str, columns: list[str], rows) -> Table:
    t = Table(title=title, show_lines=False)
    for col in columns:
        t.add_column(col)
    for row in rows:
        t.add_row(*(str(x) for x in row))
    return t


def render_table(t: Table) -> str:
    console = Console(record=True, width=120, force_terminal=False)
    with console.capture() as capture:
        console.print(t)
    return capture.get()
