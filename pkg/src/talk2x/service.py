"""HTTP chat service: sessions, messages, history, health.

The store is loaded once and never mutated by any endpoint; sessions live
in memory for the server lifetime. Turns within one session are
serialized (a concurrent second post gets 409), while distinct sessions
run concurrently against the shared store.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import agent as agent_mod
from .agent import AgentConfig
from .config import AppConfig, ConfigError
from .embedding import EmbedderConfig, create_embedder
from .llm import HttpChatClient, LLMTransportError, load_script
from .sessions import InteractionLog, SessionRegistry
from .store import VectorStore, load as load_store

logger = logging.getLogger(__name__)


@dataclass
class Engine:
    """Everything one deployment needs to answer a message."""

    store: VectorStore
    embedder: object
    llm: object
    agent_config: AgentConfig = field(default_factory=AgentConfig)
    sessions: SessionRegistry = field(default_factory=SessionRegistry)
    log: InteractionLog | None = None


def build_engine(store: VectorStore, config: AppConfig, llm=None) -> Engine:
    """Wire an engine from an app config; `llm` overrides the configured client."""
    provider = "local-hash" if config.embedder == "local" else "remote"
    embedder = create_embedder(
        EmbedderConfig(
            provider=provider,
            dimension=config.dimension,
            endpoint=config.embed_endpoint or None,
            model_name=config.embed_model or None,
            request_timeout=config.request_timeout,
        )
    )
    for collection in store.collections.values():
        if collection.dimension != embedder.dimension:
            raise ConfigError(
                f"collection {collection.name!r} has dimension {collection.dimension}, "
                f"embedder is configured for {embedder.dimension}; "
                "a store must be queried with the embedder that built it"
            )
    if llm is None:
        if config.llm == "scripted":
            if not config.llm_script:
                raise ConfigError("llm = scripted requires llm_script = <path>")
            llm = load_script(config.llm_script, loop_last=config.llm_script_loop)
        else:
            if not config.llm_endpoint:
                raise ConfigError("llm = http requires llm_endpoint")
            llm = HttpChatClient(
                config.llm_endpoint, config.llm_model, timeout=config.request_timeout
            )
    agent_config = AgentConfig(
        max_iterations=config.max_iterations,
        top_k=config.top_k,
        snippet_max_chars=config.snippet_max_chars,
        memory_window=config.memory_window,
        system_prompt=config.system_prompt or agent_mod.DEFAULT_SYSTEM_PROMPT,
    )
    return Engine(
        store=store,
        embedder=embedder,
        llm=llm,
        agent_config=agent_config,
        sessions=SessionRegistry(idle_timeout_minutes=config.session_timeout_minutes),
        log=InteractionLog(config.log_path) if config.log_path else None,
    )


def load_engine(store_dir: str | Path, config: AppConfig, llm=None) -> Engine:
    return build_engine(load_store(store_dir), config, llm=llm)


class MessageBody(BaseModel):
    text: str = ""


def create_app(engine: Engine, cors_origins: str = "*") -> FastAPI:
    app = FastAPI(title="talk2x")
    origins = [o.strip() for o in cors_origins.split(",") if o.strip()] or ["*"]
    app.add_middleware(
        CORSMiddleware,
        allow_origins=origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _log(session_id: str, actor: str, payload: str) -> None:
        if engine.log is not None:
            engine.log.append(session_id, actor, payload)

    @app.post("/api/sessions", status_code=201)
    def create_session():
        session = engine.sessions.create()
        return {"session_id": session.id}

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        session = engine.sessions.get(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        text = body.text.strip()
        if not text:
            return JSONResponse({"error": "text must be non-empty"}, status_code=400)
        if not session.turn_lock.acquire(blocking=False):
            return JSONResponse(
                {"error": "a turn is already running for this session; retry shortly"},
                status_code=409,
            )
        try:
            _log(session.id, "user", text)
            try:
                answer = agent_mod.run_turn(
                    session, text, engine.llm, engine.store, engine.embedder, engine.agent_config
                )
            except LLMTransportError as exc:
                logger.error("turn failed for session %s: %s", session.id, exc)
                return JSONResponse({"error": f"LLM transport failure: {exc}"}, status_code=502)
            for call, result in answer.trace:
                _log(
                    session.id,
                    "tool",
                    json.dumps(
                        {"tool": call.name, "arguments": call.arguments, "sources": result.sources}
                    ),
                )
            _log(session.id, "agent", answer.text)
            return {
                "answer": answer.text,
                "sources": answer.sources,
                "degraded": answer.degraded,
                "trace": [
                    {"tool": call.name, "arguments": call.arguments, "sources": result.sources}
                    for call, result in answer.trace
                ],
            }
        finally:
            session.turn_lock.release()

    @app.get("/api/sessions/{session_id}/history")
    def history(session_id: str):
        session = engine.sessions.get(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return [
            {"role": m.role, "content": m.content}
            for m in session.messages
            if m.role != "system"
        ]

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "store": {
                "website_count": engine.store.count("website"),
                "asset_count": engine.store.count("assets"),
            },
        }

    return app
