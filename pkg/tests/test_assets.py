"""Asset catalog tests: import, backfill provenance, serialization, collection build."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

import pytest

from talk2x.assets import (
    AssetRow,
    AssetStagingStore,
    AssetType,
    CatalogError,
    backfill_missing,
    build_asset_collection,
    import_catalog,
    serialize_asset,
)
from talk2x.embedding import LocalHashEmbedder
from talk2x.llm import ScriptedLLM, scripted_reply
from talk2x.store import VectorStore

DATA_DIR = Path(__file__).parent / "data"

CATALOG_HEADER = "asset_type,name,link,description,keywords\n"


def _write_catalog(tmp_path, lines: list[str]) -> Path:
    path = tmp_path / "catalog.csv"
    path.write_text(CATALOG_HEADER + "\n".join(lines) + "\n", encoding="utf-8")
    return path


# --- import: file ----------------------------------------------------------------

def test_import_file_valid_and_rejected_rows(tmp_path):
    path = _write_catalog(
        tmp_path,
        [
            "dataset,Mushroom,https://x/m,Gilled mushrooms,fungi;classification",
            "dataset,Iris,https://x/i,,botany",
            "publication,Survey,https://x/s,A survey,",
            "ml_model,Classifier,https://x/c,,",
            "experiment,Run,https://x/r,Benchmark run,benchmark",
            "educational_resource,NoLink,,Course text,course",
        ],
    )
    result = import_catalog(path)
    assert len(result.rows) == 5
    assert len(result.rejected) == 1
    assert result.rejected[0]["row"] == 7  # header is line 1
    assert all(row.generated == set() for row in result.rows)

    mushroom = result.rows[0]
    assert mushroom.asset_type is AssetType.DATASET
    assert mushroom.keywords == ["fungi", "classification"]
    iris = result.rows[1]
    assert iris.description is None
    assert result.rows[3].keywords is None


def test_import_file_unknown_type_rejected(tmp_path):
    path = _write_catalog(tmp_path, ["movie,Film,https://x/f,,"])
    result = import_catalog(path)
    assert result.rows == []
    assert "asset_type" in result.rejected[0]["reason"]


def test_import_missing_file_fatal(tmp_path):
    with pytest.raises(CatalogError):
        import_catalog(tmp_path / "nope.csv")


def test_import_file_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("name,link\nA,https://x\n")
    with pytest.raises(CatalogError):
        import_catalog(path)


# --- import: paged API ---------------------------------------------------------------

class _PagedCatalogAPI:
    """Serves `items` in pages of `page_size` via offset query parameters."""

    def __init__(self, items: list[dict], page_size: int = 10):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                query = parse_qs(urlsplit(self.path).query)
                offset = int(query.get("offset", ["0"])[0])
                batch = items[offset : offset + page_size]
                payload = json.dumps(batch).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=self._httpd.serve_forever, daemon=True).start()

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}/assets"

    def close(self):
        self._httpd.shutdown()
        self._httpd.server_close()


def test_import_api_two_pages_order_preserved():
    items = [
        {"asset_type": "dataset", "name": f"Set {i:02d}", "link": f"https://x/{i}"}
        for i in range(20)
    ]
    api = _PagedCatalogAPI(items, page_size=10)
    try:
        result = import_catalog(api.url)
        assert [row.name for row in result.rows] == [f"Set {i:02d}" for i in range(20)]
        assert result.rejected == []
    finally:
        api.close()


def test_import_api_keywords_as_list():
    items = [{"asset_type": "dataset", "name": "A", "link": "https://x/a", "keywords": ["k1", "k2"]}]
    api = _PagedCatalogAPI(items)
    try:
        assert import_catalog(api.url).rows[0].keywords == ["k1", "k2"]
    finally:
        api.close()


# --- backfill -------------------------------------------------------------------------

def _fake_fetch(url: str, timeout: float) -> bytes:
    if url.endswith("missing"):
        raise OSError("404 not found")
    return b"<html><body>Fungi page about gilled mushroom classification.</body></html>"


def test_backfill_complete_rows_pass_through_unchanged():
    rows = [
        AssetRow(AssetType.DATASET, "A", "https://x/a", description="d", keywords=["k"]),
    ]
    llm = ScriptedLLM([])  # must never be consulted
    result = backfill_missing(rows, llm, fetch=_fake_fetch)
    assert result.rows == rows
    assert result.rows[0].generated == set()
    assert result.report.filled == 0
    assert llm.requests == []


def test_backfill_fills_missing_keywords():
    rows = [AssetRow(AssetType.DATASET, "Mushroom", "https://x/m", description="d", keywords=None)]
    llm = ScriptedLLM([scripted_reply(content="fungi; classification")])
    result = backfill_missing(rows, llm, fetch=_fake_fetch)
    row = result.rows[0]
    assert row.keywords == ["fungi", "classification"]
    assert row.generated == {"keywords"}
    assert row.description == "d"


def test_backfill_fills_both_fields_with_provenance():
    rows = [AssetRow(AssetType.DATASET, "Mushroom", "https://x/m")]
    llm = ScriptedLLM(
        [scripted_reply(content="A mushroom dataset."), scripted_reply(content="fungi; edible")]
    )
    result = backfill_missing(rows, llm, fetch=_fake_fetch)
    row = result.rows[0]
    assert row.description == "A mushroom dataset."
    assert row.keywords == ["fungi", "edible"]
    assert row.generated == {"description", "keywords"}


def test_backfill_fetch_failure_isolated():
    rows = [
        AssetRow(AssetType.DATASET, "Broken", "https://x/missing"),
        AssetRow(AssetType.DATASET, "Fine", "https://x/f", keywords=["k"]),
    ]
    llm = ScriptedLLM([scripted_reply(content="A description.")])
    result = backfill_missing(rows, llm, fetch=_fake_fetch)
    broken = result.rows[0]
    assert broken.description is None and broken.keywords is None
    assert broken.generated == set()
    assert {f["field"] for f in result.report.failures} == {"description", "keywords"}
    # the healthy row still got its missing description
    assert result.rows[1].description == "A description."
    assert result.rows[1].generated == {"description"}


def test_backfill_idempotent_on_populated_rows():
    rows = [
        AssetRow(AssetType.PUBLICATION, "P", "https://x/p", description="d", keywords=["a", "b"]),
        AssetRow(AssetType.ML_MODEL, "M", "https://x/mod", description="e", keywords=["c"]),
    ]
    result = backfill_missing(rows, ScriptedLLM([]), fetch=_fake_fetch)
    assert result.rows == rows


# --- serialization ----------------------------------------------------------------------

def test_serialize_asset_golden():
    rows = [
        AssetRow(AssetType.DATASET, "Mushroom", "https://x/m",
                 description="Gilled mushrooms", keywords=["fungi"]),
        AssetRow(AssetType.DATASET, "N", "L"),
        AssetRow(AssetType.DATASET, "Iris", "https://x/i", keywords=["botany", "flowers"]),
    ]
    golden = (DATA_DIR / "asset_serialization.golden").read_text(encoding="utf-8")
    assert "\n===\n".join(serialize_asset(r) for r in rows) == golden


def test_serialization_distinct_for_distinct_rows():
    rows = [
        AssetRow(AssetType.DATASET, f"Name {i}", f"https://x/{i}") for i in range(10)
    ]
    serialized = {serialize_asset(r) for r in rows}
    assert len(serialized) == 10


# --- staging store ----------------------------------------------------------------------

def test_staging_round_trip(tmp_path):
    rows = [
        AssetRow(AssetType.DATASET, "A", "https://x/a", description="d",
                 keywords=["k1", "k2"], generated={"keywords"}),
        AssetRow(AssetType.PUBLICATION, "B", "https://x/b"),
    ]
    staging = AssetStagingStore(tmp_path / "staging")
    staging.save(rows)
    assert (tmp_path / "staging" / "dataset.csv").exists()
    assert (tmp_path / "staging" / "publication.csv").exists()
    loaded = staging.load()
    assert sorted(loaded, key=lambda r: r.name) == sorted(rows, key=lambda r: r.name)


# --- collection build ---------------------------------------------------------------------

def _five_rows() -> list[AssetRow]:
    return [
        AssetRow(AssetType.DATASET, "Mushroom Data Set", "https://x/mushroom",
                 description="Gilled mushrooms by Jeff Schlimmer", keywords=["fungi"]),
        AssetRow(AssetType.EDUCATIONAL_RESOURCE, "Course", "https://x/course"),
        AssetRow(AssetType.EXPERIMENT, "Run", "https://x/run"),
        AssetRow(AssetType.ML_MODEL, "Model", "https://x/model"),
        AssetRow(AssetType.PUBLICATION, "Paper", "https://x/paper"),
    ]


def test_build_asset_collection_metadata_round_trip():
    store = VectorStore()
    store.create_collection("assets", 32)
    embedder = LocalHashEmbedder(32)
    report = build_asset_collection(_five_rows(), embedder, store)
    assert report.total == 5
    assert all(count == 1 for count in report.counts.values())
    collection = store.collection("assets")
    types = [rec.metadata["asset_type"] for rec in collection.records]
    assert types == ["dataset", "educational_resource", "experiment", "ml_model", "publication"]
    assert all(rec.metadata["source"].startswith("https://x/") for rec in collection.records)


def test_type_filtered_search_only_matches_that_type():
    store = VectorStore()
    store.create_collection("assets", 32)
    embedder = LocalHashEmbedder(32)
    build_asset_collection(_five_rows(), embedder, store)
    hits = store.collection("assets").similarity_search(
        embedder.embed_text("anything at all"), k=5, filter={"asset_type": "dataset"}
    )
    assert [h.record.metadata["asset_type"] for h in hits] == ["dataset"]


def test_mushroom_keyword_search_finds_planted_row():
    store = VectorStore()
    store.create_collection("assets", 32)
    embedder = LocalHashEmbedder(32)
    build_asset_collection(_five_rows(), embedder, store)
    hits = store.collection("assets").keyword_filtered_search(
        embedder.embed_text("mushroom dataset"), k=4, keywords=["mushroom"]
    )
    assert len(hits) == 1
    assert hits[0].record.metadata["source"] == "https://x/mushroom"


def test_build_into_nonempty_collection_rejected(fixture_store):
    store, embedder = fixture_store
    with pytest.raises(ValueError):
        build_asset_collection(_five_rows(), embedder, store)
