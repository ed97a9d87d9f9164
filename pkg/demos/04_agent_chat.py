"""Walkthrough of the agent loop: scripted multi-tool turns with cited sources.

Run with: python3 demos/04_agent_chat.py
"""

from talk2x import (
    AgentConfig,
    AssetRow,
    AssetType,
    LocalHashEmbedder,
    PageDocument,
    ScriptedLLM,
    VectorStore,
    build_asset_collection,
    build_website_collection,
    run_turn,
    scripted_reply,
)
from talk2x.sessions import Session

# A miniature deployment: three pages, three assets.
store = VectorStore()
store.create_collection("website", 64)
store.create_collection("assets", 64)
embedder = LocalHashEmbedder(64)
build_website_collection(
    [
        PageDocument("https://demo.example/", "Home", "The demo platform shares AI resources."),
        PageDocument("https://demo.example/about", "About", "Operated by a research consortium."),
        PageDocument("https://demo.example/services", "Services", "Catalogue, marketplace, courses."),
    ],
    embedder,
    store,
)
build_asset_collection(
    [
        AssetRow(AssetType.DATASET, "Mushroom Data Set", "https://demo.example/assets/mushroom",
                 description="Gilled mushrooms by Jeff Schlimmer.", keywords=["fungi"]),
        AssetRow(AssetType.DATASET, "Iris Flowers", "https://demo.example/assets/iris",
                 description="Iris measurements.", keywords=["botany"]),
        AssetRow(AssetType.PUBLICATION, "Survey of Deep Learning", "https://demo.example/assets/survey",
                 description="A survey.", keywords=["deep learning"]),
    ],
    embedder,
    store,
)

session = Session(id="demo")
config = AgentConfig(top_k=2)

TURNS = [
    (
        "What is this platform for?",
        [
            scripted_reply(tool_calls=[("website_similarity_search", {"query": "platform purpose"})]),
            scripted_reply(content="It is a demo platform for sharing AI resources."),
        ],
    ),
    (
        "Find the mushroom dataset by Jeff Schlimmer.",
        [
            scripted_reply(
                tool_calls=[
                    ("asset_keyword_search", {"query": "mushroom dataset", "keywords": ["mushroom"]})
                ]
            ),
            scripted_reply(content="Found it: the Mushroom Data Set, donated by Jeff Schlimmer."),
        ],
    ),
]

for question, script in TURNS:
    print(f"\nuser: {question}")
    answer = run_turn(session, question, ScriptedLLM(script), store, embedder, config)
    for call, result in answer.trace:
        print(f"  [tool] {call.name}({call.arguments}) -> {len(result.sources)} source(s)")
    print(f"agent: {answer.text}")
    for url in answer.sources:
        print(f"  source: {url}")

# The session remembers the turn above, including tool results.
print(f"\nsession now holds {len(session.messages)} messages of memory")
