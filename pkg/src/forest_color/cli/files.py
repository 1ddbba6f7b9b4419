"""Coloring and stats files.

Coloring files hold one ``<label> <color>`` pair per line with 1-based DIMACS
labels; ``#`` starts a comment. The stats file is a flat JSON object.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from forest_color.base import LABEL_BASE, Color, VertexId, label_of, vertex_of
from forest_color.solver.stats import SearchStats


def load_coloring(*, path: Path) -> dict[VertexId, Color]:
    """Read a coloring file into vertex ids (see ``base.vertex_of``).

    Raises:
        ValueError: on a malformed line, an unknown color or a repeated label.
    """
    out: dict[VertexId, Color] = {}
    for number, raw in enumerate(path.read_text("utf-8").splitlines(), start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{number}: expected '<label> <color>'")
        try:
            label, value = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{number}: label and color must be integers") from None
        if label < LABEL_BASE:
            raise ValueError(f"{path}:{number}: labels start at {LABEL_BASE}, got {label}")
        if value not in (0, 1, 2):
            raise ValueError(f"{path}:{number}: color must be 0, 1 or 2, got {value}")
        v = vertex_of(label)
        if v in out:
            raise ValueError(f"{path}:{number}: label {label} colored twice")
        out[v] = Color(value)
    return out


def format_coloring(coloring: Mapping[VertexId, Color]) -> str:
    return "".join(f"{label_of(v)} {int(c)}\n" for v, c in sorted(coloring.items()))


def save_coloring(*, path: Path, coloring: Mapping[VertexId, Color]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_coloring(coloring), "utf-8")


def save_stats(
    *, path: Path, stats: SearchStats, extra: Mapping[str, object] | None = None
) -> None:
    """Write ``stats.flat()`` plus ``extra`` keys as sorted JSON."""
    doc = {**stats.flat(), **(extra or {})}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", "utf-8")
