"""talk2x: turn a website plus an asset catalog into a cited chat agent.

The pieces compose bottom-up: an exact vector store with two collections,
embedding providers, the crawl/chunk and catalog ingestion pipelines, a
budgeted function-calling agent over three search tools, and an HTTP chat
service with a CLI wrapper.
"""

from .agent import AgentAnswer, AgentConfig, Message, ToolCall, ToolResult, run_turn, tool_schemas
from .assets import AssetRow, AssetType, backfill_missing, build_asset_collection, import_catalog, serialize_asset
from .embedding import EmbedderConfig, LocalHashEmbedder, RemoteEmbedder, create_embedder
from .html_extract import PageDocument, extract_text
from .llm import HttpChatClient, ScriptedLLM, load_script, scripted_reply
from .store import Collection, Record, SearchHit, StoreError, StoreFormatError, VectorStore, load
from .website import ChunkingPolicy, CrawlConfig, build_website_collection, chunk, crawl

__version__ = "0.1.0"

__all__ = [
    "AgentAnswer",
    "AgentConfig",
    "AssetRow",
    "AssetType",
    "ChunkingPolicy",
    "Collection",
    "CrawlConfig",
    "EmbedderConfig",
    "HttpChatClient",
    "LocalHashEmbedder",
    "Message",
    "PageDocument",
    "Record",
    "RemoteEmbedder",
    "ScriptedLLM",
    "SearchHit",
    "StoreError",
    "StoreFormatError",
    "ToolCall",
    "ToolResult",
    "VectorStore",
    "backfill_missing",
    "build_asset_collection",
    "build_website_collection",
    "chunk",
    "crawl",
    "create_embedder",
    "extract_text",
    "import_catalog",
    "load",
    "load_script",
    "run_turn",
    "scripted_reply",
    "serialize_asset",
    "tool_schemas",
    "__version__",
]
