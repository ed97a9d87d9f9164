"""CLI surface tests, run through real subprocesses for honest exit codes."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from talk2x.store import VectorStore

from conftest import MUSHROOM_LINK, build_fixture_store

MUSHROOM_SCRIPT = [
    {
        "tool_calls": [
            {
                "name": "asset_keyword_search",
                "arguments": {"query": "mushroom dataset", "keywords": ["mushroom"]},
            }
        ]
    },
    {"content": "The planted mushroom dataset."},
]


def run_cli(*args: str, cwd=None) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "talk2x", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=120,
    )


def _write_scripted_config(tmp_path: Path, script=None) -> Path:
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps(script or MUSHROOM_SCRIPT), encoding="utf-8")
    config_path = tmp_path / "talk2x.conf"
    config_path.write_text(
        "# test configuration\n"
        "embedder = local\n"
        "dimension = 64\n"
        "llm = scripted\n"
        f"llm_script = {script_path}\n"
        f"log_path = {tmp_path / 'log.jsonl'}\n",
        encoding="utf-8",
    )
    return config_path


@pytest.fixture
def store_dir(tmp_path) -> Path:
    store, _ = build_fixture_store()
    target = tmp_path / "store"
    store.persist(target)
    return target


def test_ask_prints_answer_then_sources_block(tmp_path, store_dir):
    config = _write_scripted_config(tmp_path)
    result = run_cli(
        "ask", "--store", str(store_dir), "--config", str(config),
        "Please try to find the mushroom dataset by Jeff Schlimmer.",
    )
    assert result.returncode == 0, result.stderr
    assert result.stdout == (
        "The planted mushroom dataset.\n"
        "\n"
        "Sources:\n"
        f"- {MUSHROOM_LINK}\n"
    )


def test_inspect_empty_store(tmp_path):
    store = VectorStore()
    store.create_collection("website", 8)
    store.create_collection("assets", 8)
    target = tmp_path / "empty-store"
    store.persist(target)
    result = run_cli("inspect", "--store", str(target))
    assert result.returncode == 0
    assert "website: 0 records" in result.stdout
    assert "assets: 0 records" in result.stdout


def test_inspect_shows_samples(store_dir):
    result = run_cli("inspect", "--store", str(store_dir))
    assert result.returncode == 0
    assert "website: 3 records" in result.stdout
    assert "assets: 6 records" in result.stdout
    assert "sample [id 0]" in result.stdout


def test_serve_missing_store_dir_fails(tmp_path):
    config = _write_scripted_config(tmp_path)
    result = run_cli("serve", "--store", str(tmp_path / "missing"), "--config", str(config))
    assert result.returncode == 2
    assert "error" in result.stderr.lower()


def test_usage_error_exits_one():
    result = run_cli("crawl")  # --seed and --out are required
    assert result.returncode == 1
    result = run_cli("frobnicate")
    assert result.returncode == 1


def test_ask_on_corrupt_store_exits_two(tmp_path):
    config = _write_scripted_config(tmp_path)
    bad = tmp_path / "bad-store"
    bad.mkdir()
    (bad / "manifest.json").write_text("{broken")
    result = run_cli("ask", "--store", str(bad), "--config", str(config), "hello")
    assert result.returncode == 2


def test_crawl_cli_builds_persisted_store(tmp_path, crawl_sites):
    main, _ = crawl_sites
    out = tmp_path / "crawl-out"
    result = run_cli(
        "crawl", "--seed", main.base_url + "/", "--out", str(out), "--no-robots",
        "--chunk-size", "400", "--overlap", "80",
    )
    assert result.returncode == 0, result.stderr
    report = json.loads((out / "crawl_report.json").read_text())
    assert report["page_count"] == 7
    assert report["chunk_count"] >= 6
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["collections"][0]["name"] == "website"
    assert manifest["collections"][0]["count"] == report["chunk_count"]


def test_ingest_into_store_with_other_dimension_fails(tmp_path, crawl_sites):
    main, _ = crawl_sites
    out = tmp_path / "mixed"
    first = run_cli("crawl", "--seed", main.base_url + "/", "--out", str(out), "--no-robots")
    assert first.returncode == 0, first.stderr
    catalog = tmp_path / "catalog.csv"
    catalog.write_text(
        "asset_type,name,link,description,keywords\ndataset,A,https://x/a,,\n", encoding="utf-8"
    )
    config = tmp_path / "small.conf"
    config.write_text("dimension = 64\n", encoding="utf-8")
    second = run_cli(
        "ingest-assets", "--input", str(catalog), "--out", str(out), "--config", str(config)
    )
    assert second.returncode == 2
    assert "dimension" in second.stderr


def test_ingest_assets_cli(tmp_path):
    catalog = tmp_path / "catalog.csv"
    catalog.write_text(
        "asset_type,name,link,description,keywords\n"
        f"dataset,Mushroom Data Set,{MUSHROOM_LINK},Gilled mushrooms,fungi\n"
        "publication,Survey,https://x/s,A survey,\n",
        encoding="utf-8",
    )
    out = tmp_path / "assets-out"
    result = run_cli("ingest-assets", "--input", str(catalog), "--out", str(out))
    assert result.returncode == 0, result.stderr
    report = json.loads((out / "assets_report.json").read_text())
    assert report["total"] == 2
    assert report["counts"]["dataset"] == 1
    assert (out / "staging" / "dataset.csv").exists()
    assert (out / "assets.jsonl").exists()
