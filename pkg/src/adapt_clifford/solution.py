"""Solver output record shared by ADAPT-Clifford and the baselines."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .cut_energy import CutAssignment

__all__ = ["Solution", "K_SIDE", "J_SIDE"]

K_SIDE = "k"
J_SIDE = "j"


@dataclass
class Solution:
    assignment: CutAssignment
    cut_value: float
    ising_energy: float
    solver: str = "adapt"
    start_node: int | None = None
    # (side, node) per applied rotation; the first entry is (J_SIDE, j)
    gate_trace: list[tuple[str, int]] = field(default_factory=list)
    gradient_trace: list[float] = field(default_factory=list)
    seed: int | None = None
    wall_time_s: float = 0.0
    params: dict[str, Any] = field(default_factory=dict)
    # deterministic runs: (k, cut_value, ising_energy) for every start
    per_start: list[tuple[int, float, float]] | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.assignment.n

    def to_dict(self, per_start: bool = False) -> dict[str, Any]:
        out = {
            "solver": self.solver,
            "start_node": self.start_node,
            "cut_value": self.cut_value,
            "ising_energy": self.ising_energy,
            "assignment": self.assignment.to_string(),
            "gate_trace": [[side, int(node)] for side, node in self.gate_trace],
            "gradient_trace": list(self.gradient_trace),
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
        }
        if self.params:
            out["params"] = self.params
        if self.warnings:
            out["warnings"] = self.warnings
        if per_start and self.per_start is not None:
            out["per_start"] = [list(r) for r in self.per_start]
        return out

    def to_json(self, per_start: bool = False, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(per_start), indent=indent)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Solution":
        per_start = d.get("per_start")
        return cls(
            assignment=CutAssignment.from_string(d["assignment"]),
            cut_value=float(d["cut_value"]),
            ising_energy=float(d["ising_energy"]),
            solver=d.get("solver", "adapt"),
            start_node=d.get("start_node"),
            gate_trace=[(str(s), int(b)) for s, b in d.get("gate_trace", [])],
            gradient_trace=[float(x) for x in d.get("gradient_trace", [])],
            seed=d.get("seed"),
            wall_time_s=float(d.get("wall_time_s", 0.0)),
            params=d.get("params", {}),
            per_start=[(int(k), float(c), float(e)) for k, c, e in per_start] if per_start else None,
            warnings=list(d.get("warnings", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "Solution":
        return cls.from_dict(json.loads(text))
