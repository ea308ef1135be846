"""Request and response bodies of the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class GraphqlRequest(BaseModel):
    query: str
    variables: dict[str, Any] | None = None


class PathError(BaseModel):
    path: str
    message: str


class GraphqlResponse(BaseModel):
    data: dict[str, Any] | None
    errors: list[PathError] = Field(default_factory=list)


class SessionRequest(BaseModel):
    query: str
    script: str | None = None
    max_iterations: int | None = Field(default=None, ge=1)


class FollowupRequest(BaseModel):
    query: str
    script: str | None = None


class SessionCreated(BaseModel):
    session_id: str
    parent_id: str | None = None


class SessionSummary(BaseModel):
    session_id: str
    user_query: str
    parent_id: str | None
    children: list[str]
    done: bool
    completed: bool
    halt_reason: str
    stage_markers: list[str]
    record_count: int
    error: str | None


class HealthResponse(BaseModel):
    status: str
