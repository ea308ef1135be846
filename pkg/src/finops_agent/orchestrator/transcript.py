"""Transcript serialization and on-disk persistence.

Serialization is fully deterministic: stable key order, two-space
indentation, and no environment-dependent values beyond what the
session's injected clock produced. Two files are written per run: the
transcript JSON and the emitted records as JSON lines.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from finops_agent.orchestrator.planning import plan_to_payload
from finops_agent.orchestrator.recommend import emit_records, record_to_dict
from finops_agent.orchestrator.session import ReactIteration, SessionTranscript
from finops_agent.orchestrator.tools import Observation

_SAFE_RE = re.compile(r"[^A-Za-z0-9._-]+")


def _observation_payload(obs: Observation) -> dict[str, Any]:
    return {
        "ok": obs.ok,
        "route": obs.route,
        "text": obs.text,
        "sections": [
            {
                "key": s.key,
                "endpoint": s.endpoint,
                "args": dict(s.args),
                "error": s.error,
                "records": [dict(r) if isinstance(r, dict) else r for r in s.records],
            }
            for s in obs.sections
        ],
    }


def _iteration_payload(it: ReactIteration) -> dict[str, Any]:
    return {
        "index": it.index,
        "thought": it.thought,
        "action_kind": it.action_kind,
        "action_name": it.action_name,
        "action_args": dict(it.action_args) if it.action_args is not None else None,
        "tools_referenced": sorted(it.tools_referenced),
        "observation": _observation_payload(it.observation) if it.observation is not None else None,
        "raw_response": it.raw_response,
    }


def transcript_to_payload(t: SessionTranscript) -> dict[str, Any]:
    return {
        "session_id": t.session_id,
        "user_query": t.user_query,
        "model_id": t.model_id,
        "started_at": t.started_at,
        "stage_markers": list(t.stage_markers),
        "plan": plan_to_payload(t.plan) if t.plan is not None else None,
        "iterations": [_iteration_payload(i) for i in t.iterations],
        "consolidated": t.consolidated.to_payload() if t.consolidated is not None else None,
        "recommendations": [record_to_dict(r) for r in t.recommendations],
        "dropped_records": t.dropped_records,
        "wall_time_seconds": t.wall_time_seconds,
        "halt_reason": t.halt_reason,
        "iteration_cap_exceeded": t.iteration_cap_exceeded,
        "used_parent_context": t.used_parent_context,
        "notes": list(t.notes),
    }


def transcript_to_json(t: SessionTranscript) -> str:
    return json.dumps(transcript_to_payload(t), ensure_ascii=False, indent=2) + "\n"


def _timestamp_tag(started_at: str) -> str:
    return re.sub(r"[^0-9TZ]", "", started_at.replace("+00:00", "Z"))[:16] or "run"


def _unique(path: Path) -> Path:
    if not path.exists():
        return path
    stem, suffix = path.stem, path.suffix
    n = 2
    while True:
        candidate = path.with_name(f"{stem}-{n}{suffix}")
        if not candidate.exists():
            return candidate
        n += 1


def persist_transcript(
    t: SessionTranscript, out_dir: str | Path, run_tag: str = ""
) -> tuple[Path, Path]:
    """Write <timestamp>-<model>.json and <timestamp>-records.jsonl under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = _timestamp_tag(t.started_at)
    if run_tag:
        base = f"{base}-{_SAFE_RE.sub('-', run_tag)}"
    model = _SAFE_RE.sub("-", t.model_id) or "unknown"
    transcript_path = _unique(out / f"{base}-{model}.json")
    records_path = _unique(out / f"{base}-records.jsonl")
    transcript_path.write_text(transcript_to_json(t), encoding="utf-8")
    emit_records(t.recommendations, records_path)
    return transcript_path, records_path
