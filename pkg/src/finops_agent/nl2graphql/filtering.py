"""Schema filtering: pick the endpoints relevant to a request.

Deterministic keyword-overlap heuristic over endpoint names and tool
descriptions. Endpoints scoring zero are dropped; when nothing scores,
the whole schema is kept so downstream generation always has options.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from finops_agent.schema_core.digest import introspect
from finops_agent.schema_core.sdl import UnifiedSchema

_TOKEN_RE = re.compile(r"[a-z0-9]+")

STOPWORDS = frozenset(
    "a an and are as at be by for from in is it me my of on or our that the their this to we with".split()
)


def tokenize_text(text: str) -> frozenset[str]:
    return frozenset(t for t in _TOKEN_RE.findall(text.lower()) if t not in STOPWORDS)


@dataclass(frozen=True)
class SchemaSubset:
    endpoints: tuple[str, ...]  # canonical names, sorted
    digest_fragment: str


def endpoint_keywords(schema: UnifiedSchema) -> dict[str, frozenset[str]]:
    """Keyword bag per endpoint: its name tokens plus description tokens."""
    digest = introspect(schema)
    bags = {}
    for entry in digest.entries:
        bags[entry.name] = tokenize_text(entry.name.replace("_", " ")) | tokenize_text(entry.description)
    return bags


def overlap_score(request_tokens: frozenset[str], keywords: frozenset[str]) -> int:
    return len(request_tokens & keywords)


def filter_schema(nl_request: str, schema: UnifiedSchema) -> SchemaSubset:
    """Endpoints whose keywords overlap the request; all of them as a fallback."""
    request_tokens = tokenize_text(nl_request)
    bags = endpoint_keywords(schema)
    retained = sorted(name for name, bag in bags.items() if overlap_score(request_tokens, bag) > 0)
    if not retained:
        retained = sorted(bags)
    digest = introspect(schema)
    fragment = "\n".join(digest.entry(name).render() for name in retained)
    return SchemaSubset(endpoints=tuple(retained), digest_fragment=fragment)
