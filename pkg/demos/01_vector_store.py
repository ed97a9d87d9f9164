"""Walkthrough of the vector store: collections, search, persistence.

Run with: python3 demos/01_vector_store.py
"""

import tempfile
from pathlib import Path

from talk2x import LocalHashEmbedder, VectorStore, load

# Every deployment has exactly two collections; this demo only needs one.
store = VectorStore()
collection = store.create_collection("assets", dimension=64)
embedder = LocalHashEmbedder(64)

texts = [
    "name: Mushroom Data Set\nlink: https://x/mushroom\nkeywords: fungi\ndescription: Gilled mushrooms.",
    "name: Iris Flowers\nlink: https://x/iris\nkeywords: botany\ndescription: Iris measurements.",
    "name: Survey of Deep Learning\nlink: https://x/survey\nkeywords: deep learning\ndescription: A survey.",
]
for i, text in enumerate(texts):
    record_id = collection.add(text, embedder.embed_text(text), {"source": f"https://x/{i}"})
    print(f"stored record {record_id}: {text.splitlines()[0]}")

print("\n-- similarity search ------------------------------------")
query = embedder.embed_text("mushroom fungi dataset")
for hit in collection.similarity_search(query, k=3):
    print(f"  d={hit.distance:.4f}  id={hit.record.id}  {hit.record.text.splitlines()[0]}")

print("\n-- keyword-filtered search -------------------------------")
for hit in collection.keyword_filtered_search(query, k=3, keywords=["iris"]):
    print(f"  d={hit.distance:.4f}  id={hit.record.id}  {hit.record.text.splitlines()[0]}")

print("\n-- persistence -------------------------------------------")
with tempfile.TemporaryDirectory() as tmp:
    target = Path(tmp) / "store"
    store.persist(target)
    print(f"persisted to {target}:", sorted(p.name for p in target.iterdir()))
    reloaded = load(target)
    hits = reloaded.collection("assets").similarity_search(query, k=1)
    print(f"reloaded store answers identically: id={hits[0].record.id}")
