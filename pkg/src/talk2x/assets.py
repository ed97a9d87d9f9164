"""Asset-catalog ingestion: import, backfill, serialize, embed.

Catalog rows arrive from a delimited file or a paged JSON API, get staged
in a small tabular store (one delimited file per asset type), have their
missing descriptions/keywords synthesized from the linked page with
provenance flags, and finally become records in the `assets` collection.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import requests

from .html_extract import extract_text
from .store import VectorStore

logger = logging.getLogger(__name__)

CATALOG_COLUMNS = ("asset_type", "name", "link", "description", "keywords")
KEYWORD_SEPARATOR = ";"

DESCRIPTION_PROMPT = (
    "Write a 2-3 sentence description of the resource named {name!r} "
    "based on the following webpage text. Reply with the description only.\n\n{text}"
)
KEYWORDS_PROMPT = (
    "Produce 3-8 semicolon-separated keywords for the resource named {name!r} "
    "based on the following webpage text. Reply with the keywords only.\n\n{text}"
)


class CatalogError(Exception):
    """The catalog source cannot be read at all."""


class AssetType(Enum):
    DATASET = "dataset"
    EDUCATIONAL_RESOURCE = "educational_resource"
    EXPERIMENT = "experiment"
    ML_MODEL = "ml_model"
    PUBLICATION = "publication"


@dataclass
class AssetRow:
    """One staged catalog entry with provenance for synthesized fields."""

    asset_type: AssetType
    name: str
    link: str
    description: str | None = None
    keywords: list[str] | None = None
    generated: set[str] = field(default_factory=set)


@dataclass
class CatalogImport:
    rows: list[AssetRow] = field(default_factory=list)
    rejected: list[dict] = field(default_factory=list)  # {"row": n, "reason": str}


def _parse_keywords(raw: str | None) -> list[str] | None:
    if raw is None:
        return None
    parts = [part.strip() for part in str(raw).split(KEYWORD_SEPARATOR)]
    parts = [part for part in parts if part]
    return parts or None


def _row_from_fields(fields: dict, row_number: int, result: CatalogImport) -> None:
    name = (fields.get("name") or "").strip()
    link = (fields.get("link") or "").strip()
    type_raw = (fields.get("asset_type") or "").strip()
    if not name or not link:
        result.rejected.append({"row": row_number, "reason": "missing name or link"})
        return
    try:
        asset_type = AssetType(type_raw)
    except ValueError:
        result.rejected.append({"row": row_number, "reason": f"unknown asset_type {type_raw!r}"})
        return
    description = (fields.get("description") or "").strip() or None
    keywords = fields.get("keywords")
    if isinstance(keywords, list):
        keywords = [str(k).strip() for k in keywords if str(k).strip()] or None
    else:
        keywords = _parse_keywords(keywords)
    result.rows.append(
        AssetRow(asset_type=asset_type, name=name, link=link, description=description, keywords=keywords)
    )


def import_catalog_file(path: str | Path) -> CatalogImport:
    """Import a delimited catalog file (header: asset_type,name,link,description,keywords)."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [col for col in CATALOG_COLUMNS if col not in header]
            if missing:
                raise CatalogError(f"catalog file {path} lacks columns: {', '.join(missing)}")
            result = CatalogImport()
            for row_number, fields in enumerate(reader, start=2):  # 1 is the header
                _row_from_fields(fields, row_number, result)
            return result
    except OSError as exc:
        raise CatalogError(f"cannot read catalog file {path}: {exc}") from exc


def import_catalog_api(
    url: str,
    page_size: int = 100,
    timeout: float = 30.0,
    session: requests.Session | None = None,
    max_requests: int = 1000,
) -> CatalogImport:
    """Import from a paged JSON API returning arrays of catalog objects.

    Pages are requested with offset/limit query parameters until an empty
    array comes back; item order is preserved across pages.
    """
    session = session or requests.Session()
    result = CatalogImport()
    offset = 0
    for _ in range(max_requests):
        try:
            response = session.get(
                url, params={"offset": offset, "limit": page_size}, timeout=timeout
            )
            response.raise_for_status()
            batch = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise CatalogError(f"catalog API {url} failed at offset {offset}: {exc}") from exc
        if not isinstance(batch, list):
            raise CatalogError(f"catalog API {url} returned a non-array page")
        if not batch:
            return result
        for item in batch:
            offset += 1
            if not isinstance(item, dict):
                result.rejected.append({"row": offset, "reason": "non-object item"})
                continue
            _row_from_fields(item, offset, result)
    raise CatalogError(f"catalog API {url} did not terminate within {max_requests} pages")


def import_catalog(source: str | Path, **kwargs) -> CatalogImport:
    """Dispatch on the source: http(s) URLs hit the paged API, anything else is a file."""
    text = str(source)
    if text.startswith(("http://", "https://")):
        return import_catalog_api(text, **kwargs)
    return import_catalog_file(source, **kwargs)


class AssetStagingStore:
    """Tabular staging layer: one delimited file per asset type.

    The schema is four content columns plus provenance, and the only
    operations are a full scan and a full rewrite, so a CSV file per type
    stands in for the SQL table an adapted deployment might use.
    """

    FIELDS = ("name", "link", "description", "keywords", "generated")

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def save(self, rows: list[AssetRow]) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        by_type: dict[AssetType, list[AssetRow]] = {t: [] for t in AssetType}
        for row in rows:
            by_type[row.asset_type].append(row)
        for asset_type, type_rows in by_type.items():
            with open(
                self.directory / f"{asset_type.value}.csv", "w", encoding="utf-8", newline=""
            ) as fh:
                writer = csv.DictWriter(fh, fieldnames=self.FIELDS)
                writer.writeheader()
                for row in type_rows:
                    writer.writerow(
                        {
                            "name": row.name,
                            "link": row.link,
                            "description": row.description or "",
                            "keywords": KEYWORD_SEPARATOR.join(row.keywords or []),
                            "generated": KEYWORD_SEPARATOR.join(sorted(row.generated)),
                        }
                    )

    def load(self) -> list[AssetRow]:
        rows: list[AssetRow] = []
        for asset_type in AssetType:
            path = self.directory / f"{asset_type.value}.csv"
            if not path.exists():
                continue
            with open(path, encoding="utf-8", newline="") as fh:
                for fields in csv.DictReader(fh):
                    rows.append(
                        AssetRow(
                            asset_type=asset_type,
                            name=fields.get("name", ""),
                            link=fields.get("link", ""),
                            description=(fields.get("description") or "").strip() or None,
                            keywords=_parse_keywords(fields.get("keywords") or None),
                            generated=set(filter(None, (fields.get("generated") or "").split(KEYWORD_SEPARATOR))),
                        )
                    )
        return rows


@dataclass
class BackfillLimits:
    fetch_timeout: float = 10.0
    max_page_chars: int = 4000


@dataclass
class BackfillReport:
    filled: int = 0
    failures: list[dict] = field(default_factory=list)  # {"link", "field", "reason"}


@dataclass
class BackfillResult:
    rows: list[AssetRow]
    report: BackfillReport


def _default_fetch(url: str, timeout: float) -> bytes:
    response = requests.get(url, timeout=timeout)
    response.raise_for_status()
    return response.content


def backfill_missing(
    rows: list[AssetRow],
    llm,
    fetch=_default_fetch,
    limits: BackfillLimits | None = None,
) -> BackfillResult:
    """Fill absent descriptions/keywords by crawling each row's link.

    The linked page's visible text is handed to the LLM with a fixed
    prompt per missing field; every synthesized field is flagged in the
    row's `generated` set. Rows that fail to fetch or generate keep the
    field absent and land in the report. Complete rows pass through
    untouched.
    """
    limits = limits or BackfillLimits()
    report = BackfillReport()
    out: list[AssetRow] = []
    for row in rows:
        missing = [f for f in ("description", "keywords") if getattr(row, f) is None]
        if not missing:
            out.append(row)
            continue
        try:
            page_text = extract_text(fetch(row.link, limits.fetch_timeout), row.link).text
        except Exception as exc:
            for field_name in missing:
                report.failures.append({"link": row.link, "field": field_name, "reason": str(exc)})
            out.append(row)
            continue
        page_text = page_text[: limits.max_page_chars]

        updated = replace(row, generated=set(row.generated))
        for field_name in missing:
            template = DESCRIPTION_PROMPT if field_name == "description" else KEYWORDS_PROMPT
            prompt = template.format(name=row.name, text=page_text)
            try:
                content = llm.complete_text(prompt).strip()
            except Exception as exc:
                report.failures.append({"link": row.link, "field": field_name, "reason": str(exc)})
                continue
            if field_name == "keywords":
                keywords = _parse_keywords(content)
                if keywords is None:
                    report.failures.append(
                        {"link": row.link, "field": field_name, "reason": "empty keyword reply"}
                    )
                    continue
                updated.keywords = keywords
            else:
                if not content:
                    report.failures.append(
                        {"link": row.link, "field": field_name, "reason": "empty description reply"}
                    )
                    continue
                updated.description = content
            updated.generated.add(field_name)
            report.filled += 1
        out.append(updated)
    return BackfillResult(rows=out, report=report)


def serialize_asset(row: AssetRow) -> str:
    """The exact string that gets embedded and keyword-searched for a row."""
    keywords = ", ".join(row.keywords) if row.keywords else ""
    return (
        f"name: {row.name}\n"
        f"link: {row.link}\n"
        f"keywords: {keywords}\n"
        f"description: {row.description or ''}"
    )


@dataclass
class AssetIngestReport:
    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0
    rejected: list[dict] = field(default_factory=list)
    backfill: BackfillReport | None = None

    def to_dict(self) -> dict:
        out = {"counts": dict(self.counts), "total": self.total, "rejected": list(self.rejected)}
        if self.backfill is not None:
            out["backfill"] = {
                "filled": self.backfill.filled,
                "failures": list(self.backfill.failures),
            }
        return out


def build_asset_collection(rows: list[AssetRow], embedder, store: VectorStore) -> AssetIngestReport:
    """Serialize and embed every row into the (empty) `assets` collection."""
    collection = store.collection("assets")
    if len(collection) > 0:
        raise ValueError("assets collection is not empty; re-ingestion rebuilds from scratch")
    report = AssetIngestReport(counts={t.value: 0 for t in AssetType})
    texts = [serialize_asset(row) for row in rows]
    for row, text, vector in zip(rows, texts, embedder.embed_batch(texts)):
        collection.add(
            text,
            vector,
            {
                "source": row.link,
                "asset_type": row.asset_type.value,
                "generated": sorted(row.generated),
            },
        )
        report.counts[row.asset_type.value] += 1
        report.total += 1
    return report
