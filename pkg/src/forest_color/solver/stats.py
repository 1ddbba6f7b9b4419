"""Search counters and the sink protocol the pipeline reports them through.

The pipeline never reads its own counters back. It only calls a
``StatsSink``, so benchmarking can swap in a collector without changing the
search itself.
"""

from __future__ import annotations

import threading
import time
from typing import Protocol

from pydantic import BaseModel, Field

from forest_color.base import VertexId
from forest_color.bushy import PartitionCounts

SCHEMA_VERSION = 1


class SearchStats(BaseModel):
    """Counters of one solve. All counts only grow while the solve runs."""

    components: int = 0
    residuals: int = 0
    branch_nodes: int = 0
    csp_calls: int = 0
    csp_nodes: int = 0
    enumerated_assignments: int = 0
    # Sum over residuals of 3^|R| * 2^|I| * 9^(chromatic trees)
    assignment_bound: int = 0
    chromatic_trees: int = 0
    trivial_configurations: int = 0
    partitions: list[PartitionCounts] = Field(default_factory=list)
    wall_time: float = 0.0

    def partition_totals(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for counts in self.partitions:
            for key, value in counts.flat().items():
                totals[key] = totals.get(key, 0) + value
        return totals

    def flat(self) -> dict[str, float | int]:
        """Dotted-key view for the stats file: ``search.*`` and ``partition.*``."""
        out: dict[str, float | int] = {"schema_version": SCHEMA_VERSION}
        for key, value in self.model_dump(exclude={"partitions"}).items():
            out[f"search.{key}"] = value
        for key, value in self.partition_totals().items():
            out[f"partition.{key}"] = value
        return out


class StatsSink(Protocol):
    """Receives search events as the pipeline works."""

    def on_component(self, vertices: int) -> None:
        """A connected component of the input is about to be solved."""
        ...

    def on_branch(self, vertex: VertexId, children: int) -> None:
        """The reduce phase branched on ``vertex``."""
        ...

    def on_residual(
        self, counts: PartitionCounts | None, bound: int, trees: int, trivial: int
    ) -> None:
        """A branch-free residual is ready for enumeration.

        ``counts`` is ``None`` for residuals small enough to skip the forests.
        """
        ...

    def on_assignment(self) -> None:
        """One full fixed-color assignment reached the CSP stage."""
        ...

    def on_csp_call(self) -> None: ...

    def on_csp_node(self) -> None: ...


class NullStatsSink:
    """Discards every event."""

    def on_component(self, vertices: int) -> None:
        pass

    def on_branch(self, vertex: VertexId, children: int) -> None:
        pass

    def on_residual(
        self, counts: PartitionCounts | None, bound: int, trees: int, trivial: int
    ) -> None:
        pass

    def on_assignment(self) -> None:
        pass

    def on_csp_call(self) -> None:
        pass

    def on_csp_node(self) -> None:
        pass


class StatsCollector:
    """Thread-safe sink that accumulates a ``SearchStats``."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._stats = SearchStats()
        self._started = time.perf_counter()

    def on_component(self, vertices: int) -> None:
        with self._lock:
            self._stats.components += 1

    def on_branch(self, vertex: VertexId, children: int) -> None:
        with self._lock:
            self._stats.branch_nodes += 1

    def on_residual(
        self, counts: PartitionCounts | None, bound: int, trees: int, trivial: int
    ) -> None:
        with self._lock:
            s = self._stats
            s.residuals += 1
            s.assignment_bound += bound
            s.chromatic_trees += trees
            s.trivial_configurations += trivial
            if counts is not None:
                s.partitions.append(counts)

    def on_assignment(self) -> None:
        with self._lock:
            self._stats.enumerated_assignments += 1

    def on_csp_call(self) -> None:
        with self._lock:
            self._stats.csp_calls += 1

    def on_csp_node(self) -> None:
        with self._lock:
            self._stats.csp_nodes += 1

    def snapshot(self) -> SearchStats:
        with self._lock:
            stats = self._stats.model_copy(deep=True)
        stats.wall_time = time.perf_counter() - self._started
        return stats


class TeeSink:
    """Forwards every event to each of ``sinks`` in order."""

    def __init__(self, *sinks: StatsSink) -> None:
        self._sinks = sinks

    def on_component(self, vertices: int) -> None:
        for s in self._sinks:
            s.on_component(vertices)

    def on_branch(self, vertex: VertexId, children: int) -> None:
        for s in self._sinks:
            s.on_branch(vertex, children)

    def on_residual(
        self, counts: PartitionCounts | None, bound: int, trees: int, trivial: int
    ) -> None:
        for s in self._sinks:
            s.on_residual(counts, bound, trees, trivial)

    def on_assignment(self) -> None:
        for s in self._sinks:
            s.on_assignment()

    def on_csp_call(self) -> None:
        for s in self._sinks:
            s.on_csp_call()

    def on_csp_node(self) -> None:
        for s in self._sinks:
            s.on_csp_node()
