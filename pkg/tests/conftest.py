"""Shared fixtures: recording HTTP servers, fixture sites, and a small fixture store."""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from talk2x.assets import AssetRow, AssetType, build_asset_collection
from talk2x.embedding import LocalHashEmbedder
from talk2x.html_extract import PageDocument
from talk2x.store import VectorStore
from talk2x.website import build_website_collection

FIXTURE_DIMENSION = 64

MUSHROOM_LINK = "https://catalog.example.org/datasets/mushroom"

ASSET_ROWS = [
    AssetRow(
        asset_type=AssetType.DATASET,
        name="Mushroom Data Set",
        link=MUSHROOM_LINK,
        description="Gilled mushrooms described in terms of physical characteristics, donated by Jeff Schlimmer.",
        keywords=["fungi", "classification"],
    ),
    AssetRow(
        asset_type=AssetType.DATASET,
        name="Iris Flowers",
        link="https://catalog.example.org/datasets/iris",
        description="Measurements of iris flowers across three species.",
        keywords=["botany"],
    ),
    AssetRow(
        asset_type=AssetType.PUBLICATION,
        name="Survey of Deep Learning",
        link="https://catalog.example.org/publications/dl-survey",
        description="A broad survey of deep learning methods.",
        keywords=["deep learning"],
    ),
    AssetRow(
        asset_type=AssetType.ML_MODEL,
        name="Image Classifier",
        link="https://catalog.example.org/models/image-classifier",
        description="A convolutional model for image classification.",
        keywords=["vision"],
    ),
    AssetRow(
        asset_type=AssetType.EDUCATIONAL_RESOURCE,
        name="Intro to AI Course",
        link="https://catalog.example.org/courses/intro-ai",
        description="A beginner course on artificial intelligence.",
        keywords=["course"],
    ),
    AssetRow(
        asset_type=AssetType.EXPERIMENT,
        name="Benchmark Run 42",
        link="https://catalog.example.org/experiments/run-42",
        description="A benchmark experiment comparing optimizers.",
        keywords=["benchmark"],
    ),
]

WEBSITE_PAGES = [
    PageDocument(
        url="https://site.example.org/",
        title="Fixture AI Platform",
        text="Welcome to the Fixture AI Platform. The platform connects researchers with AI resources and services.",
    ),
    PageDocument(
        url="https://site.example.org/about",
        title="About",
        text="The platform is operated by a European research consortium whose purpose is to unite the AI community.",
    ),
    PageDocument(
        url="https://site.example.org/services",
        title="Services",
        text="Services on the platform include a metadata catalogue, a model marketplace and training courses.",
    ),
]


def build_fixture_store() -> tuple[VectorStore, LocalHashEmbedder]:
    """Website + assets collections populated from the module fixtures."""
    store = VectorStore()
    store.create_collection("website", FIXTURE_DIMENSION)
    store.create_collection("assets", FIXTURE_DIMENSION)
    embedder = LocalHashEmbedder(FIXTURE_DIMENSION)
    build_website_collection(WEBSITE_PAGES, embedder, store)
    build_asset_collection(ASSET_ROWS, embedder, store)
    return store, embedder


@pytest.fixture
def fixture_store():
    return build_fixture_store()


class RecordingServer:
    """Threaded HTTP server that serves a path->page map and records requests."""

    def __init__(self, pages: dict[str, tuple[str, bytes]]):
        self.pages = dict(pages)
        self.requests: list[str] = []  # request paths, in arrival order
        self._lock = threading.Lock()

        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                with server._lock:
                    server.requests.append(self.path)
                page = server.pages.get(self.path)
                if page is None:
                    self.send_response(404)
                    self.send_header("Content-Type", "text/plain")
                    self.end_headers()
                    self.wfile.write(b"not found")
                    return
                content_type, body = page
                self.send_response(200)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def shutdown(self):
        self._httpd.shutdown()
        self._httpd.server_close()


def _html(body: str, *links: str) -> bytes:
    anchors = "".join(f'<a href="{href}">link</a>' for href in links)
    return f"<html><head><title>fixture</title></head><body>{body}{anchors}</body></html>".encode()


def seven_page_site(foreign_base: str) -> dict[str, tuple[str, bytes]]:
    """Seven interlinked pages, two links to a foreign host, one duplicate link."""
    html = "text/html"
    return {
        "/": (
            html,
            _html(
                "<p>Welcome to the Fixture AI Platform.</p>",
                "/a",
                "/b",
                "/a/",  # duplicate of /a after trailing-slash canonicalization
                f"{foreign_base}/external-one",
                f"{foreign_base}/external-two",
            ),
        ),
        "/a": (html, _html("<p>About: operated by a research consortium.</p>", "/c", "/d")),
        "/b": (html, _html("<p>Services: catalogue, marketplace, courses.</p>", "/e")),
        "/c": (html, _html("<p>Datasets: browse curated datasets.</p>")),
        "/d": (html, _html("<p>The metadata catalogue stores asset descriptions.</p>")),
        "/e": (html, _html("<p>Educational resources: tutorials and courses.</p>", "/f")),
        "/f": (html, b"<html><body><script>var x = 1;</script></body></html>"),
    }


@pytest.fixture
def crawl_sites():
    """(main site, foreign site) pair of recording servers."""
    foreign = RecordingServer({"/external-one": ("text/html", b"<html>out</html>")})
    main = RecordingServer(seven_page_site(foreign.base_url))
    yield main, foreign
    main.shutdown()
    foreign.shutdown()
