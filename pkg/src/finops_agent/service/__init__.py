from finops_agent.service.app import ServiceConfig, ServiceState, create_app
from finops_agent.service.sessions import (
    SessionEvent,
    SessionManager,
    SessionNotFoundError,
    SessionNotReadyError,
    SessionRun,
    UnknownScriptError,
)

__all__ = [
    "ServiceConfig",
    "ServiceState",
    "SessionEvent",
    "SessionManager",
    "SessionNotFoundError",
    "SessionNotReadyError",
    "SessionRun",
    "UnknownScriptError",
    "create_app",
]
