"""LLM clients: the chat-completions wire protocol and a scripted stand-in.

The scripted client replays a fixed transcript of tool calls and answers,
which keeps agent tests and demos deterministic and fully offline. Both
clients expose the same two methods: `complete` (chat with optional
tools) and `complete_text` (one prompt in, plain text out).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import requests

from .agent import Message, ToolCall

API_KEY_ENV = "TALK2X_LLM_API_KEY"


class LLMTransportError(Exception):
    """The model endpoint could not produce a usable reply."""


def message_to_wire(message: Message) -> dict:
    wire: dict = {"role": message.role, "content": message.content}
    if message.tool_calls:
        wire["tool_calls"] = [
            {
                "id": call.id,
                "type": "function",
                "function": {"name": call.name, "arguments": json.dumps(call.arguments)},
            }
            for call in message.tool_calls
        ]
    if message.tool_call_id is not None:
        wire["tool_call_id"] = message.tool_call_id
    return wire


def message_from_wire(wire: dict) -> Message:
    tool_calls = None
    if wire.get("tool_calls"):
        tool_calls = []
        for item in wire["tool_calls"]:
            function = item.get("function", {})
            raw_arguments = function.get("arguments", "{}")
            try:
                arguments = json.loads(raw_arguments)
            except (TypeError, json.JSONDecodeError):
                # Keep the malformed payload; the tool executor turns it
                # into an error result instead of crashing the loop.
                arguments = raw_arguments
            tool_calls.append(
                ToolCall(id=item.get("id", ""), name=function.get("name", ""), arguments=arguments)
            )
    return Message(
        role=wire.get("role", "assistant"),
        content=wire.get("content") or "",
        tool_calls=tool_calls,
    )


class HttpChatClient:
    """POST {endpoint}/chat/completions with {"model", "messages", "tools"}."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.timeout = timeout
        self._session = session or requests.Session()

    def complete(self, messages: list[Message], tools: list[dict] | None = None) -> Message:
        body: dict = {
            "model": self.model,
            "messages": [message_to_wire(m) for m in messages],
        }
        if tools:
            body["tools"] = tools
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        url = f"{self.endpoint}/chat/completions"
        try:
            response = self._session.post(url, json=body, headers=headers, timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise LLMTransportError(f"chat request to {url} failed: {exc}") from exc
        except ValueError as exc:
            raise LLMTransportError(f"chat response is not JSON: {exc}") from exc
        try:
            wire = payload["choices"][0]["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise LLMTransportError(f"chat response carries no message: {payload!r}") from exc
        return message_from_wire(wire)

    def complete_text(self, prompt: str) -> str:
        return self.complete([Message(role="user", content=prompt)]).content


class ScriptedLLM:
    """Replays a fixed list of assistant replies, one per `complete` call.

    Every received request is recorded on `requests` so tests can assert
    what the agent actually sent. When the script runs out, the client
    either repeats its last reply (`loop_last`) or fails like a dead
    endpoint would.
    """

    def __init__(self, replies: list[Message], loop_last: bool = False):
        self._replies = list(replies)
        self._cursor = 0
        self.loop_last = loop_last
        self.requests: list[tuple[list[Message], list[dict] | None]] = []

    def complete(self, messages: list[Message], tools: list[dict] | None = None) -> Message:
        self.requests.append((list(messages), tools))
        if self._cursor >= len(self._replies):
            if self.loop_last and self._replies:
                return self._replies[-1]
            raise LLMTransportError("scripted transcript exhausted")
        reply = self._replies[self._cursor]
        self._cursor += 1
        return reply

    def complete_text(self, prompt: str) -> str:
        return self.complete([Message(role="user", content=prompt)]).content


def scripted_reply(content: str = "", tool_calls: list[tuple[str, dict]] | None = None, call_id_prefix: str = "call") -> Message:
    """Convenience constructor for one scripted assistant reply."""
    calls = None
    if tool_calls:
        calls = [
            ToolCall(id=f"{call_id_prefix}_{i}", name=name, arguments=arguments)
            for i, (name, arguments) in enumerate(tool_calls)
        ]
    return Message(role="assistant", content=content, tool_calls=calls)


def load_script(path: str | Path, loop_last: bool = False) -> ScriptedLLM:
    """Load a scripted transcript from a JSON file.

    The file holds a list of replies; each is an object with either
    "content" (a final answer) or "tool_calls": a list of
    {"name": ..., "arguments": {...}} objects. Call ids are generated.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError(f"script {path} must be a JSON list of replies")
    replies = []
    for i, item in enumerate(data):
        calls = [(c["name"], c.get("arguments", {})) for c in item.get("tool_calls", [])]
        replies.append(
            scripted_reply(
                content=item.get("content", ""),
                tool_calls=calls or None,
                call_id_prefix=f"call{i}",
            )
        )
    return ScriptedLLM(replies, loop_last=loop_last)
