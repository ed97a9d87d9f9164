"""One-shot website ingestion: crawl, extract, chunk, embed, store.

The crawl happens exactly once per deployment; afterwards every answer is
served from the vector store, so the pipeline favors determinism over
throughput (breadth-first order, sequential fetches, stable chunk
offsets).
"""

from __future__ import annotations

import logging
import urllib.robotparser
from collections import deque
from dataclasses import dataclass, field
from urllib.parse import urlsplit, urlunsplit

import requests

from .html_extract import Extraction, Extractor, PageDocument, default_registry
from .store import VectorStore

logger = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "talk2x-crawler/0.1"


class CrawlError(Exception):
    """The crawl could not start (bad seed, unreachable seed)."""


@dataclass
class CrawlConfig:
    seed: str
    max_pages: int = 64
    max_depth: int = 3
    same_host_only: bool = True
    fetch_timeout: float = 10.0
    user_agent: str = DEFAULT_USER_AGENT
    respect_robots: bool = True

    def __post_init__(self):
        parts = urlsplit(self.seed)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise CrawlError(f"seed must be an absolute http(s) URL, got {self.seed!r}")
        if self.max_pages <= 0:
            raise CrawlError("max_pages must be positive")
        if self.max_depth < 0:
            raise CrawlError("max_depth must be non-negative")


@dataclass
class ChunkingPolicy:
    max_chars: int = 1000
    overlap_chars: int = 200

    def __post_init__(self):
        if self.max_chars <= 0:
            raise ValueError("max_chars must be positive")
        if not 0 <= self.overlap_chars < self.max_chars:
            raise ValueError("overlap_chars must be non-negative and smaller than max_chars")


def normalize_url(url: str) -> str:
    """Canonical form used for dedupe: lowercase scheme/host, no fragment,
    default ports dropped, trailing slashes trimmed (root stays "/")."""
    parts = urlsplit(url)
    scheme = parts.scheme.lower()
    host = (parts.hostname or "").lower()
    port = parts.port
    if port is not None and not (
        (scheme == "http" and port == 80) or (scheme == "https" and port == 443)
    ):
        host = f"{host}:{port}"
    path = parts.path.rstrip("/") or "/"
    return urlunsplit((scheme, host, path, parts.query, ""))


def _host_of(url: str) -> str:
    parts = urlsplit(url)
    host = (parts.hostname or "").lower()
    return f"{host}:{parts.port}" if parts.port is not None else host


def chunk(text: str, policy: ChunkingPolicy) -> list[str]:
    """Sliding character windows of max_chars, stepping max_chars - overlap_chars.

    The final window is truncated at the text end; empty text yields no
    chunks. Stripping the first overlap_chars characters of every chunk
    after the first and concatenating reproduces the input exactly.
    """
    if not text:
        return []
    step = policy.max_chars - policy.overlap_chars
    chunks = []
    start = 0
    while True:
        end = min(start + policy.max_chars, len(text))
        chunks.append(text[start:end])
        if end >= len(text):
            break
        start += step
    return chunks


class _RobotsPolicy:
    """Wraps stdlib robots.txt parsing; failures to fetch mean allow-all."""

    def __init__(self, seed: str, user_agent: str, timeout: float, session: requests.Session):
        self.user_agent = user_agent
        self._parser: urllib.robotparser.RobotFileParser | None = None
        parts = urlsplit(seed)
        robots_url = urlunsplit((parts.scheme, parts.netloc, "/robots.txt", "", ""))
        try:
            response = session.get(
                robots_url, timeout=timeout, headers={"User-Agent": user_agent}
            )
        except requests.RequestException as exc:
            logger.debug("robots.txt fetch failed (%s); allowing all", exc)
            return
        if response.status_code == 200:
            parser = urllib.robotparser.RobotFileParser()
            parser.parse(response.text.splitlines())
            self._parser = parser

    def allowed(self, url: str) -> bool:
        return self._parser is None or self._parser.can_fetch(self.user_agent, url)


def crawl(
    config: CrawlConfig,
    extractors: dict[str, Extractor] | None = None,
    session: requests.Session | None = None,
) -> list[PageDocument]:
    """Breadth-first crawl from the seed, one fetch per normalized URL.

    Only links on the seed's host are followed when same_host_only is
    set. The crawl stops at max_pages fetched pages or max_depth link
    hops. A dead seed is fatal; any later fetch failure is logged and
    skipped.
    """
    extractors = default_registry() if extractors is None else extractors
    session = session or requests.Session()
    seed = normalize_url(config.seed)
    seed_host = _host_of(seed)

    robots = None
    if config.respect_robots and config.same_host_only:
        robots = _RobotsPolicy(seed, config.user_agent, config.fetch_timeout, session)

    frontier: deque[tuple[str, int]] = deque([(seed, 0)])
    seen = {seed}
    pages: list[PageDocument] = []
    fetched = 0

    while frontier and fetched < config.max_pages:
        url, depth = frontier.popleft()
        try:
            response = session.get(
                url, timeout=config.fetch_timeout, headers={"User-Agent": config.user_agent}
            )
            response.raise_for_status()
        except requests.RequestException as exc:
            if url == seed:
                raise CrawlError(f"seed {seed} is unreachable: {exc}") from exc
            logger.warning("skipping %s: %s", url, exc)
            continue
        fetched += 1

        content_type = response.headers.get("Content-Type", "").split(";")[0].strip().lower()
        extractor = extractors.get(content_type)
        if extractor is None:
            logger.warning("skipping %s: no extractor for content type %r", url, content_type)
            continue
        extraction: Extraction = extractor(response.content, url)
        pages.append(extraction.document)

        if depth >= config.max_depth:
            continue
        for link in extraction.links:
            parts = urlsplit(link)
            if parts.scheme not in ("http", "https"):
                continue
            normalized = normalize_url(link)
            if config.same_host_only and _host_of(normalized) != seed_host:
                continue
            if normalized in seen:
                continue
            if robots is not None and not robots.allowed(normalized):
                logger.info("robots.txt disallows %s", normalized)
                continue
            seen.add(normalized)
            frontier.append((normalized, depth + 1))

    return pages


@dataclass
class WebsiteIngestReport:
    page_count: int = 0
    chunk_count: int = 0
    skipped_pages: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "page_count": self.page_count,
            "chunk_count": self.chunk_count,
            "skipped_pages": list(self.skipped_pages),
        }


def build_website_collection(
    pages: list[PageDocument],
    embedder,
    store: VectorStore,
    policy: ChunkingPolicy | None = None,
) -> WebsiteIngestReport:
    """Chunk and embed every page into the (empty) `website` collection.

    Each chunk becomes one record whose metadata carries the page URL as
    `source`. Pages with no visible text produce no records and are
    reported as skipped. Embedder failures propagate and abort ingestion.
    """
    policy = policy or ChunkingPolicy()
    collection = store.collection("website")
    if len(collection) > 0:
        raise ValueError("website collection is not empty; re-ingestion rebuilds from scratch")

    report = WebsiteIngestReport(page_count=len(pages))
    for page in pages:
        chunks = chunk(page.text, policy)
        if not chunks:
            report.skipped_pages.append(page.url)
            continue
        for text, vector in zip(chunks, embedder.embed_batch(chunks)):
            collection.add(text, vector, {"source": page.url})
        report.chunk_count += len(chunks)
    return report
