"""The function-calling loop: plan, search, evaluate, repeat, answer with sources.

The LLM is invoked with three search tools over the two collections. Any
reply that carries tool calls gets them all executed and fed back; a
reply without tool calls is the final answer. The loop is budgeted, and
every surfaced source link comes from an actual tool result — the
mechanically checkable half of honest citation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .assets import AssetType
from .store import SearchHit, VectorStore

logger = logging.getLogger(__name__)

WEBSITE_SEARCH = "website_similarity_search"
ASSET_SEARCH = "asset_similarity_search"
ASSET_KEYWORD_SEARCH = "asset_keyword_search"

NO_RESULTS = "no results found"

DEFAULT_SYSTEM_PROMPT = (
    "You are a helpful assistant for one specific website. Answer user questions "
    "using ONLY information retrieved through your search tools; never invent facts. "
    "Search the website collection for questions about the site itself and the asset "
    "collection for datasets, models, publications, experiments, and courses. You may "
    "search several times with refined queries. Always list the source links of the "
    "information you used. If the searches return nothing useful, say so and ask a "
    "clarifying question instead of guessing."
)

DEGRADED_ANSWER = (
    "I could not reach a confident answer within my search budget; the results "
    "gathered so far were inconclusive. Please rephrase or narrow the question. "
    "Any sources listed below are from the partial searches."
)


@dataclass
class ToolCall:
    id: str
    name: str
    arguments: Any  # dict when well-formed; anything else is rejected downstream


@dataclass
class ToolResult:
    tool_call_id: str
    content: str
    sources: list[str] = field(default_factory=list)


@dataclass
class Message:
    role: str  # system | user | assistant | tool
    content: str = ""
    tool_calls: list[ToolCall] | None = None
    tool_call_id: str | None = None


@dataclass
class AgentConfig:
    max_iterations: int = 8
    top_k: int = 4
    snippet_max_chars: int = 500
    memory_window: int = 12
    system_prompt: str = DEFAULT_SYSTEM_PROMPT

    def __post_init__(self):
        for name in ("max_iterations", "top_k", "snippet_max_chars", "memory_window"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.system_prompt:
            raise ValueError("system_prompt must be non-empty")


@dataclass
class AgentAnswer:
    text: str
    sources: list[str]
    trace: list[tuple[ToolCall, ToolResult]]
    degraded: bool = False


def tool_schemas() -> list[dict]:
    """The three search tools, in chat-completions function format."""
    asset_type_values = [t.value for t in AssetType]
    return [
        {
            "type": "function",
            "function": {
                "name": WEBSITE_SEARCH,
                "description": (
                    "Search the crawled website content by meaning. Use this for "
                    "questions about the site itself: its purpose, operators, "
                    "services, and any information written on its pages."
                ),
                "parameters": {
                    "type": "object",
                    "properties": {
                        "query": {"type": "string", "description": "What to look for."}
                    },
                    "required": ["query"],
                },
            },
        },
        {
            "type": "function",
            "function": {
                "name": ASSET_SEARCH,
                "description": (
                    "Search the asset catalog (datasets, educational resources, "
                    "experiments, ML models, publications) by meaning. Optionally "
                    "restrict to one asset type."
                ),
                "parameters": {
                    "type": "object",
                    "properties": {
                        "query": {"type": "string", "description": "What to look for."},
                        "asset_type": {
                            "type": "string",
                            "enum": asset_type_values,
                            "description": "Restrict results to this asset type.",
                        },
                    },
                    "required": ["query"],
                },
            },
        },
        {
            "type": "function",
            "function": {
                "name": ASSET_KEYWORD_SEARCH,
                "description": (
                    "Like the asset similarity search, but every returned asset "
                    "must contain all given keywords in its text. Use this when "
                    "the user names specific terms that must appear."
                ),
                "parameters": {
                    "type": "object",
                    "properties": {
                        "query": {"type": "string", "description": "What to look for."},
                        "keywords": {
                            "type": "array",
                            "items": {"type": "string"},
                            "description": "Terms that must all occur in the asset text.",
                        },
                        "asset_type": {
                            "type": "string",
                            "enum": asset_type_values,
                            "description": "Restrict results to this asset type.",
                        },
                    },
                    "required": ["query", "keywords"],
                },
            },
        },
    ]


def _dedupe(urls: list[str]) -> list[str]:
    seen = set()
    out = []
    for url in urls:
        if url not in seen:
            seen.add(url)
            out.append(url)
    return out


def _format_hits(hits: list[SearchHit], snippet_max_chars: int) -> tuple[str, list[str]]:
    if not hits:
        return NO_RESULTS, []
    lines = []
    sources = []
    for i, hit in enumerate(hits, start=1):
        source = hit.record.metadata.get("source", "")
        snippet = hit.record.text[:snippet_max_chars]
        lines.append(f"[{i}] (source: {source}) {snippet}")
        sources.append(source)
    return "\n".join(lines), _dedupe(sources)


def _error_result(call: ToolCall, reason: str) -> ToolResult:
    return ToolResult(tool_call_id=call.id, content=f"error: {reason}", sources=[])


def execute_tool(call: ToolCall, store: VectorStore, embedder, config: AgentConfig) -> ToolResult:
    """Run one tool call against the store; never raises.

    Unknown tools and malformed arguments return an error-text result so
    the LLM can recover in the next round.
    """
    if call.name not in (WEBSITE_SEARCH, ASSET_SEARCH, ASSET_KEYWORD_SEARCH):
        return _error_result(call, f"unknown tool {call.name!r}")
    args = call.arguments
    if not isinstance(args, dict):
        return _error_result(call, "arguments must be a JSON object")
    query = args.get("query")
    if not isinstance(query, str) or not query.strip():
        return _error_result(call, "'query' must be a non-empty string")

    metadata_filter = None
    if call.name in (ASSET_SEARCH, ASSET_KEYWORD_SEARCH) and "asset_type" in args:
        asset_type = args["asset_type"]
        if asset_type not in [t.value for t in AssetType]:
            return _error_result(call, f"unknown asset_type {asset_type!r}")
        metadata_filter = {"asset_type": asset_type}

    collection_name = "website" if call.name == WEBSITE_SEARCH else "assets"
    try:
        collection = store.collection(collection_name)
        vector = embedder.embed_text(query)
        if call.name == ASSET_KEYWORD_SEARCH:
            keywords = args.get("keywords")
            if (
                not isinstance(keywords, list)
                or not keywords
                or not all(isinstance(kw, str) for kw in keywords)
                or not any(kw.strip() for kw in keywords)
            ):
                return _error_result(call, "'keywords' must be a non-empty list of strings")
            hits = collection.keyword_filtered_search(
                vector, config.top_k, keywords, filter=metadata_filter
            )
        else:
            hits = collection.similarity_search(vector, config.top_k, filter=metadata_filter)
    except Exception as exc:
        logger.warning("tool %s failed: %s", call.name, exc)
        return _error_result(call, str(exc))

    content, sources = _format_hits(hits, config.snippet_max_chars)
    return ToolResult(tool_call_id=call.id, content=content, sources=sources)


def memory_window(session, n: int) -> list[Message]:
    """The last n session messages (system prompt excluded), in order.

    Tool messages stay in the window so follow-up questions can refer to
    previously retrieved results.
    """
    visible = [m for m in session.messages if m.role != "system"]
    return visible[-n:]


def run_turn(
    session,
    user_text: str,
    llm,
    store: VectorStore,
    embedder,
    config: AgentConfig | None = None,
) -> AgentAnswer:
    """One full conversational turn: loop tools until a final, cited answer.

    At most max_iterations tool rounds run; exhausting the budget yields a
    degraded answer with whatever sources were gathered. LLM transport
    failures propagate and leave the session untouched.
    """
    config = config or AgentConfig()
    schemas = tool_schemas()
    turn_messages: list[Message] = [Message(role="user", content=user_text)]
    working = (
        [Message(role="system", content=config.system_prompt)]
        + memory_window(session, config.memory_window)
        + turn_messages
    )

    trace: list[tuple[ToolCall, ToolResult]] = []
    answer_text = None
    degraded = False
    for _ in range(config.max_iterations):
        reply = llm.complete(working, tools=schemas)
        working.append(reply)
        turn_messages.append(reply)
        if not reply.tool_calls:
            answer_text = reply.content or ""
            break
        for call in reply.tool_calls:
            result = execute_tool(call, store, embedder, config)
            trace.append((call, result))
            tool_message = Message(
                role="tool", content=result.content, tool_call_id=result.tool_call_id
            )
            working.append(tool_message)
            turn_messages.append(tool_message)
    if answer_text is None:
        degraded = True
        answer_text = DEGRADED_ANSWER
        turn_messages.append(Message(role="assistant", content=answer_text))

    sources = _dedupe([src for _, result in trace for src in result.sources])
    session.messages.extend(turn_messages)
    return AgentAnswer(text=answer_text, sources=sources, trace=trace, degraded=degraded)
