"""Shared result record returned by both solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Solution

SOLVED = "solved"
TIMEOUT = "timeout"
INFEASIBLE = "infeasible"


@dataclass
class SolveResult:
    status: str
    makespan: float | None = None
    solution: Solution | None = None
    stats: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status == SOLVED
