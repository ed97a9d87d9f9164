"""Exact, persistable vector store with two collections and L2 search primitives.

The store is deliberately simple: collections are append-only lists of
records, search is an exhaustive scan, and persistence is a manifest plus
one JSON-lines file per collection. At the sizes this engine targets
(tens to a few thousand chunks per site) an exact scan is both fast
enough and trivially testable against a naive oracle.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

COLLECTION_NAMES = ("website", "assets")
MANIFEST_NAME = "manifest.json"
FORMAT_VERSION = 1

# Either a mapping matched by equality against record metadata, or an
# arbitrary predicate over the metadata dict.
MetadataFilter = Union[Mapping[str, Any], Callable[[dict], bool]]


class StoreError(Exception):
    """A store contract was violated (bad name, dimension, metadata...)."""


class StoreFormatError(StoreError):
    """A persisted store directory is missing, corrupt, or unsupported."""


@dataclass
class Record:
    """One stored chunk or asset string: the unit of retrieval."""

    id: int
    text: str
    embedding: np.ndarray  # float32, length == collection dimension
    metadata: dict


@dataclass
class SearchHit:
    """A record plus its L2 distance to the query (true root, not squared)."""

    record: Record
    distance: float


def _as_embedding(values: Sequence[float] | np.ndarray, dimension: int) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float32)
    if vec.ndim != 1:
        raise StoreError("embedding must be a flat sequence of floats")
    if vec.shape[0] != dimension:
        raise StoreError(
            f"embedding has {vec.shape[0]} components, collection dimension is {dimension}"
        )
    if not np.all(np.isfinite(vec)):
        raise StoreError("embedding components must all be finite")
    return vec


def _matches(metadata: dict, flt: MetadataFilter | None) -> bool:
    if flt is None:
        return True
    if callable(flt):
        return bool(flt(metadata))
    return all(metadata.get(key) == value for key, value in flt.items())


class Collection:
    """A named, fixed-dimension, append-only sequence of records."""

    def __init__(self, name: str, dimension: int):
        if name not in COLLECTION_NAMES:
            raise StoreError(f"collection name must be one of {COLLECTION_NAMES}, got {name!r}")
        if dimension <= 0:
            raise StoreError(f"dimension must be positive, got {dimension}")
        self.name = name
        self.dimension = dimension
        self.records: list[Record] = []
        self._matrix: np.ndarray | None = None  # float64 cache for distance math

    def __len__(self) -> int:
        return len(self.records)

    def add(self, text: str, embedding: Sequence[float] | np.ndarray, metadata: Mapping[str, Any]) -> int:
        """Append a record and return its id (0, 1, 2, ... in insertion order)."""
        vec = _as_embedding(embedding, self.dimension)
        meta = dict(metadata)
        source = meta.get("source")
        if not source:
            raise StoreError("record metadata must contain a non-empty 'source'")
        record_id = self.records[-1].id + 1 if self.records else 0
        self.records.append(Record(id=record_id, text=text, embedding=vec, metadata=meta))
        self._matrix = None
        return record_id

    def _rank(self, query: Sequence[float] | np.ndarray, k: int, rows: list[int]) -> list[SearchHit]:
        """Rank the given record rows by L2 distance ascending, ties by id."""
        if k <= 0:
            raise StoreError(f"k must be positive, got {k}")
        vec = _as_embedding(query, self.dimension)
        if not rows:
            return []
        if self._matrix is None:
            self._matrix = np.stack([r.embedding for r in self.records]).astype(np.float64)
        diffs = self._matrix[rows] - vec.astype(np.float64)
        distances = np.sqrt(np.sum(diffs * diffs, axis=1))
        ranked = sorted(zip(distances, rows), key=lambda pair: (pair[0], self.records[pair[1]].id))
        return [SearchHit(record=self.records[row], distance=float(dist)) for dist, row in ranked[:k]]

    def similarity_search(
        self,
        query: Sequence[float] | np.ndarray,
        k: int,
        filter: MetadataFilter | None = None,
    ) -> list[SearchHit]:
        """The k nearest records by L2 distance, ascending, ties by id.

        The metadata filter is applied before ranking; if fewer than k
        records survive it, all survivors are returned.
        """
        rows = [i for i, rec in enumerate(self.records) if _matches(rec.metadata, filter)]
        return self._rank(query, k, rows)

    def keyword_filtered_search(
        self,
        query: Sequence[float] | np.ndarray,
        k: int,
        keywords: Sequence[str],
        filter: MetadataFilter | None = None,
    ) -> list[SearchHit]:
        """similarity_search restricted to records whose text contains every keyword.

        Matching is a case-insensitive substring test. Because the scan is
        exact, filtering before ranking returns the same hits as running an
        exhaustive similarity search and post-filtering the results.
        """
        terms = [kw.strip().lower() for kw in keywords if kw.strip()]
        if not terms:
            raise StoreError("keyword list must contain at least one non-empty keyword")
        rows = [
            i
            for i, rec in enumerate(self.records)
            if all(term in rec.text.lower() for term in terms) and _matches(rec.metadata, filter)
        ]
        return self._rank(query, k, rows)


@dataclass
class VectorStore:
    """Holds at most the two named collections: `website` and `assets`."""

    collections: dict[str, Collection] = field(default_factory=dict)

    def create_collection(self, name: str, dimension: int) -> Collection:
        if name in self.collections:
            raise StoreError(f"collection {name!r} already exists")
        collection = Collection(name, dimension)
        self.collections[name] = collection
        return collection

    def collection(self, name: str) -> Collection:
        try:
            return self.collections[name]
        except KeyError:
            raise StoreError(f"no collection named {name!r}") from None

    def count(self, name: str) -> int:
        return len(self.collections[name]) if name in self.collections else 0

    def persist(self, directory: str | Path) -> None:
        """Write the store to `directory` (manifest.json + <name>.jsonl files)."""
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        manifest = {
            "version": FORMAT_VERSION,
            "collections": [
                {"name": col.name, "dimension": col.dimension, "count": len(col)}
                for col in self.collections.values()
            ],
        }
        (path / MANIFEST_NAME).write_text(
            json.dumps(manifest, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        for col in self.collections.values():
            with open(path / f"{col.name}.jsonl", "w", encoding="utf-8", newline="\n") as fh:
                for rec in col.records:
                    line = json.dumps(
                        {
                            "id": rec.id,
                            "text": rec.text,
                            # float() widens exactly, so json emits the shortest
                            # decimal that round-trips back to the same float32.
                            "embedding": [float(x) for x in rec.embedding],
                            "metadata": rec.metadata,
                        },
                        ensure_ascii=False,
                    )
                    fh.write(line + "\n")


def load(directory: str | Path) -> VectorStore:
    """Load a store persisted by :meth:`VectorStore.persist`."""
    path = Path(directory)
    manifest_path = path / MANIFEST_NAME
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise StoreFormatError(f"no manifest at {manifest_path}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreFormatError(f"unreadable manifest at {manifest_path}: {exc}") from exc

    version = manifest.get("version")
    if version != FORMAT_VERSION:
        raise StoreFormatError(f"unknown store format version {version!r}")

    store = VectorStore()
    for entry in manifest.get("collections", []):
        name, dimension, count = entry.get("name"), entry.get("dimension"), entry.get("count")
        collection = store.create_collection(name, dimension)
        jsonl_path = path / f"{name}.jsonl"
        try:
            lines = jsonl_path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise StoreFormatError(f"cannot read {jsonl_path}: {exc}") from exc
        last_id = -1
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreFormatError(f"{jsonl_path}:{lineno}: invalid JSON: {exc}") from exc
            embedding = obj.get("embedding", [])
            if len(embedding) != dimension:
                raise StoreFormatError(
                    f"{jsonl_path}:{lineno}: record has {len(embedding)} components, "
                    f"manifest declares dimension {dimension}"
                )
            rec_id = obj.get("id")
            if not isinstance(rec_id, int) or rec_id <= last_id:
                raise StoreFormatError(f"{jsonl_path}:{lineno}: ids must be strictly increasing")
            last_id = rec_id
            collection.records.append(
                Record(
                    id=rec_id,
                    text=obj.get("text", ""),
                    embedding=np.asarray(embedding, dtype=np.float32),
                    metadata=obj.get("metadata", {}),
                )
            )
        if len(collection) != count:
            raise StoreFormatError(
                f"{jsonl_path}: manifest declares {count} records, file has {len(collection)}"
            )
    return store


def l2_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Plain scalar L2 distance; handy for spot checks and demos."""
    return math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(a, b)))
