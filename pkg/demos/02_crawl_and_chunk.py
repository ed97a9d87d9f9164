"""Walkthrough of website ingestion: crawl a throwaway local site, chunk, embed.

Starts a tiny in-process HTTP site so the demo stays fully offline.

Run with: python3 demos/02_crawl_and_chunk.py
"""

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from talk2x import (
    ChunkingPolicy,
    CrawlConfig,
    LocalHashEmbedder,
    VectorStore,
    build_website_collection,
    chunk,
    crawl,
)

PAGES = {
    "/": b'<html><body><h1>Demo Garden Blog</h1><p>Hundreds of posts about plants.</p><a href="/roses">roses</a><a href="/compost">compost</a></body></html>',
    "/roses": b"<html><body><p>Roses need six hours of sun and regular pruning in spring.</p></body></html>",
    "/compost": b"<html><body><p>" + b"Compost improves soil structure. " * 60 + b"</p></body></html>",
}


class Handler(BaseHTTPRequestHandler):
    def do_GET(self):
        body = PAGES.get(self.path, b"")
        self.send_response(200 if body else 404)
        self.send_header("Content-Type", "text/html")
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
threading.Thread(target=httpd.serve_forever, daemon=True).start()
seed = f"http://127.0.0.1:{httpd.server_address[1]}/"
print(f"demo site listening at {seed}")

print("\n-- crawl --------------------------------------------------")
pages = crawl(CrawlConfig(seed=seed, respect_robots=False))
for page in pages:
    print(f"  fetched {page.url}  ({len(page.text)} chars of visible text)")

print("\n-- chunking ----------------------------------------------")
policy = ChunkingPolicy(max_chars=300, overlap_chars=60)
long_page = max(pages, key=lambda p: len(p.text))
pieces = chunk(long_page.text, policy)
print(f"longest page ({len(long_page.text)} chars) -> {len(pieces)} overlapping chunks")
for i, piece in enumerate(pieces):
    print(f"  chunk {i}: {len(piece)} chars, starts {piece[:40]!r}")

print("\n-- build the website collection ---------------------------")
store = VectorStore()
store.create_collection("website", 64)
report = build_website_collection(pages, LocalHashEmbedder(64), store, policy)
print(f"pages={report.page_count} chunks={report.chunk_count} skipped={report.skipped_pages}")

query = LocalHashEmbedder(64).embed_text("how much sun do roses need")
hits = store.collection("website").similarity_search(query, k=2)
for hit in hits:
    print(f"  d={hit.distance:.4f}  source={hit.record.metadata['source']}")

httpd.shutdown()
