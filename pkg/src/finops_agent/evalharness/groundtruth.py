"""Expert ground truth for the benchmark use case.

A ground truth names the canonical retrieval steps (each bound to a
tool), the precedence pairs a correct plan must respect, interchange
groups whose members may run in any mutual order, and the oracle
consolidation key sets a correct dataset must reproduce.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from finops_agent.errors import FinopsError
from finops_agent.schema_core.sdl import CANONICAL_ENDPOINTS


class GroundTruthError(FinopsError):
    """The ground truth file is malformed or internally inconsistent."""


@dataclass(frozen=True)
class GroundTruth:
    use_case: str
    step_tools: Mapping[str, str]  # step id -> tool name, insertion ordered
    precedence: tuple[tuple[str, str], ...]
    interchange_groups: tuple[frozenset[str], ...]
    oracle_keys: Mapping[str, frozenset]  # record type -> comparison keys
    min_records: int = 1

    @property
    def step_ids(self) -> tuple[str, ...]:
        return tuple(self.step_tools)


def _check_acyclic(step_ids: tuple[str, ...], precedence: tuple[tuple[str, str], ...]) -> None:
    # Kahn's algorithm; leftovers mean a cycle.
    indegree = {s: 0 for s in step_ids}
    outgoing: dict[str, list[str]] = {s: [] for s in step_ids}
    for before, after in precedence:
        outgoing[before].append(after)
        indegree[after] += 1
    queue = [s for s in step_ids if indegree[s] == 0]
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for nxt in outgoing[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    if seen != len(step_ids):
        raise GroundTruthError("precedence pairs form a cycle")


def validate_groundtruth(gt: GroundTruth) -> None:
    for step, tool in gt.step_tools.items():
        if tool not in CANONICAL_ENDPOINTS:
            raise GroundTruthError(f"step {step!r} bound to unknown tool {tool!r}")
    ids = set(gt.step_ids)
    for before, after in gt.precedence:
        if before not in ids or after not in ids:
            raise GroundTruthError(f"precedence pair ({before!r}, {after!r}) names unknown steps")
        if before == after:
            raise GroundTruthError(f"precedence pair may not be reflexive: {before!r}")
    _check_acyclic(gt.step_ids, gt.precedence)
    edge_set = {frozenset(p) for p in gt.precedence}
    for group in gt.interchange_groups:
        if not group <= ids:
            raise GroundTruthError(f"interchange group {sorted(group)} names unknown steps")
        for a in group:
            for z in group:
                if a < z and frozenset((a, z)) in edge_set:
                    raise GroundTruthError(
                        f"interchange group members {a!r} and {z!r} share a precedence edge"
                    )


def load_groundtruth(path: str | Path) -> GroundTruth:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        steps = raw["canonical_steps"]
        step_tools = {s["id"]: s["tool"] for s in steps}
        if len(step_tools) != len(steps):
            raise GroundTruthError("duplicate step ids")
        oracle = raw["oracle_dataset"]
        oracle_keys: dict[str, frozenset] = {
            "applications": frozenset(oracle["applications"]),
            "commitments": frozenset(oracle["commitments"]),
        }
        for rtype in ("entities", "actions", "anomalies", "rightsizings"):
            oracle_keys[rtype] = frozenset(tuple(pair) for pair in oracle[rtype])
        gt = GroundTruth(
            use_case=raw.get("use_case", ""),
            step_tools=step_tools,
            precedence=tuple((p[0], p[1]) for p in raw["precedence"]),
            interchange_groups=tuple(frozenset(g) for g in raw.get("interchange_groups", [])),
            oracle_keys=oracle_keys,
            min_records=int(raw.get("min_records", 1)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise GroundTruthError(f"ground truth file malformed: {exc!r}") from None
    validate_groundtruth(gt)
    return gt
