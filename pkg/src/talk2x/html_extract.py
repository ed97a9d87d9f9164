"""Visible-text extraction from HTML, plus the content-type extractor registry.

Only an HTML extractor ships in core. Other document types (PDF and
friends) plug in through the registry keyed by content type; the crawler
skips responses nobody claims, with a logged warning.
"""

from __future__ import annotations

import re
from collections.abc import Callable
from dataclasses import dataclass, field
from html.parser import HTMLParser
from urllib.parse import urljoin

_WS_RE = re.compile(r"\s+")
_SKIPPED_TAGS = {"script", "style", "template"}


@dataclass
class PageDocument:
    """A fetched page reduced to its URL, title, and visible text."""

    url: str
    title: str | None
    text: str


@dataclass
class Extraction:
    """Extractor output: the document plus hyperlinks for the crawl frontier."""

    document: PageDocument
    links: list[str] = field(default_factory=list)


Extractor = Callable[[bytes, str], Extraction]


class _VisibleTextParser(HTMLParser):
    """Collects body-visible text, the page title, and anchor hrefs."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.pieces: list[str] = []
        self.links: list[str] = []
        self.title_pieces: list[str] = []
        self._skip_depth = 0
        self._head_depth = 0
        self._in_title = False

    def handle_starttag(self, tag, attrs):
        if tag in _SKIPPED_TAGS:
            self._skip_depth += 1
        elif tag == "head":
            self._head_depth += 1
        elif tag == "title":
            self._in_title = True
        elif tag == "a":
            href = dict(attrs).get("href")
            if href:
                self.links.append(href)
        # Block-level boundaries must not glue adjacent words together.
        self.pieces.append(" ")

    def handle_endtag(self, tag):
        if tag in _SKIPPED_TAGS and self._skip_depth > 0:
            self._skip_depth -= 1
        elif tag == "head" and self._head_depth > 0:
            self._head_depth -= 1
        elif tag == "title":
            self._in_title = False
        self.pieces.append(" ")

    def handle_data(self, data):
        if self._in_title:
            self.title_pieces.append(data)
            return
        if self._skip_depth == 0 and self._head_depth == 0:
            self.pieces.append(data)


def extract_text(html: bytes | str, base_url: str) -> PageDocument:
    """Extract the visible text and title of an HTML page.

    Script, style, and template contents are removed; text inside the
    head never counts as visible. Whitespace runs collapse to single
    spaces. Decoding is UTF-8 with lossy fallback.
    """
    return extract_html(html, base_url).document


def extract_html(html: bytes | str, base_url: str) -> Extraction:
    """Like :func:`extract_text` but also harvests absolute hyperlinks."""
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")
    parser = _VisibleTextParser()
    parser.feed(html)
    parser.close()
    text = _WS_RE.sub(" ", "".join(parser.pieces)).strip()
    title = _WS_RE.sub(" ", "".join(parser.title_pieces)).strip() or None
    links = []
    for href in parser.links:
        href = href.strip()
        if not href or href.startswith(("javascript:", "mailto:", "tel:", "#")):
            continue
        links.append(urljoin(base_url, href))
    return Extraction(document=PageDocument(url=base_url, title=title, text=text), links=links)


def default_registry() -> dict[str, Extractor]:
    """Content-type -> extractor map; core ships HTML only."""
    return {
        "text/html": extract_html,
        "application/xhtml+xml": extract_html,
    }
