"""Walkthrough of asset ingestion: import, backfill with provenance, serialize.

A scripted LLM stands in for the real model so the backfill step is
reproducible offline.

Run with: python3 demos/03_asset_catalog.py
"""

import tempfile
from pathlib import Path

from talk2x import (
    LocalHashEmbedder,
    ScriptedLLM,
    VectorStore,
    build_asset_collection,
    import_catalog,
    scripted_reply,
    serialize_asset,
)
from talk2x.assets import backfill_missing

CATALOG = """asset_type,name,link,description,keywords
dataset,Mushroom Data Set,https://catalog.example.org/mushroom,Gilled mushrooms by Jeff Schlimmer,fungi;classification
dataset,Iris Flowers,https://catalog.example.org/iris,,
publication,Survey of Deep Learning,https://catalog.example.org/survey,A broad survey,
ml_model,,https://catalog.example.org/broken,,
"""

with tempfile.TemporaryDirectory() as tmp:
    catalog_path = Path(tmp) / "catalog.csv"
    catalog_path.write_text(CATALOG)

    print("-- import -------------------------------------------------")
    imported = import_catalog(catalog_path)
    print(f"imported {len(imported.rows)} rows, rejected {len(imported.rejected)}:")
    for rejection in imported.rejected:
        print(f"  row {rejection['row']}: {rejection['reason']}")

    print("\n-- backfill -----------------------------------------------")
    # The Iris row lacks description and keywords; the scripted LLM
    # provides one reply per missing field, in row order.
    llm = ScriptedLLM(
        [
            scripted_reply(content="Measurements of iris flowers across three species."),
            scripted_reply(content="botany; flowers; classic"),
            scripted_reply(content="survey; deep learning"),
        ]
    )
    fake_fetch = lambda url, timeout: b"<html><body>A classic catalog page.</body></html>"
    result = backfill_missing(imported.rows, llm, fetch=fake_fetch)
    for row in result.rows:
        flag = f" (generated: {sorted(row.generated)})" if row.generated else ""
        print(f"  {row.asset_type.value}: {row.name}{flag}")

    print("\n-- serialization (what actually gets embedded) -------------")
    print(serialize_asset(result.rows[1]))

    print("\n-- build the assets collection ------------------------------")
    store = VectorStore()
    store.create_collection("assets", 64)
    embedder = LocalHashEmbedder(64)
    report = build_asset_collection(result.rows, embedder, store)
    print(f"stored {report.total} records: { {k: v for k, v in report.counts.items() if v} }")

    hits = store.collection("assets").keyword_filtered_search(
        embedder.embed_text("mushroom dataset"), k=4, keywords=["mushroom"]
    )
    print(f"keyword search ['mushroom'] -> {hits[0].record.metadata['source']}")
