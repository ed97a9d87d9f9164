// One-page chat view: a search mask, a response field, clickable sources.
//
// The view re-renders from ChatViewState after every change, so the state
// object is the single source of truth and the easy thing to test.

import { ApiError, createSession, sendMessage, type MessageResponse, type TraceEntry } from "./api.js";

export interface TranscriptEntry {
  role: "user" | "agent" | "error";
  text: string;
  sources: string[];
  degraded: boolean;
  trace: TraceEntry[];
}

export interface ChatViewState {
  sessionId: string | null;
  transcript: TranscriptEntry[];
  pending: boolean;
  bannerText: string | null;
}

export class ChatApp {
  state: ChatViewState = {
    sessionId: null,
    transcript: [],
    pending: false,
    bannerText: null,
  };

  private banner: HTMLDivElement;
  private transcriptEl: HTMLDivElement;
  private form: HTMLFormElement;
  private input: HTMLInputElement;
  private sendButton: HTMLButtonElement;
  private retryButton: HTMLButtonElement;

  constructor(private root: HTMLElement) {
    this.root.innerHTML = `
      <div class="banner" hidden>
        <span class="banner-text"></span>
        <button type="button" class="retry-button">retry</button>
      </div>
      <div class="transcript"></div>
      <form class="composer">
        <input class="chat-input" type="text" autocomplete="off"
               placeholder="Ask about this website..." aria-label="message" />
        <button class="send-button" type="submit">Send</button>
      </form>
    `;
    this.banner = root.querySelector(".banner") as HTMLDivElement;
    this.transcriptEl = root.querySelector(".transcript") as HTMLDivElement;
    this.form = root.querySelector(".composer") as HTMLFormElement;
    this.input = root.querySelector(".chat-input") as HTMLInputElement;
    this.sendButton = root.querySelector(".send-button") as HTMLButtonElement;
    this.retryButton = root.querySelector(".retry-button") as HTMLButtonElement;

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send(this.input.value);
    });
    this.input.addEventListener("input", () => this.syncControls());
    this.retryButton.addEventListener("click", () => void this.init());
  }

  // Create the session. One page load = one session; a reload starts fresh.
  async init(): Promise<void> {
    this.state.bannerText = null;
    try {
      this.state.sessionId = await createSession();
    } catch (err) {
      this.state.sessionId = null;
      this.state.bannerText = `Could not reach the chat service (${describe(err)}).`;
    }
    this.render();
  }

  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || this.state.pending || !this.state.sessionId) return;

    this.state.transcript.push({
      role: "user",
      text: trimmed,
      sources: [],
      degraded: false,
      trace: [],
    });
    this.state.pending = true;
    this.input.value = "";
    this.render();

    let entry: TranscriptEntry;
    try {
      const response: MessageResponse = await sendMessage(this.state.sessionId, trimmed);
      entry = {
        role: "agent",
        text: response.answer,
        sources: response.sources,
        degraded: response.degraded,
        trace: response.trace,
      };
    } catch (err) {
      // Errors become an inline bubble; the transcript so far stays put.
      entry = {
        role: "error",
        text: `Request failed: ${describe(err)}`,
        sources: [],
        degraded: false,
        trace: [],
      };
    }
    this.state.transcript.push(entry);
    this.state.pending = false;
    this.render();
  }

  render(): void {
    this.banner.hidden = this.state.bannerText === null;
    (this.banner.querySelector(".banner-text") as HTMLSpanElement).textContent =
      this.state.bannerText ?? "";

    this.transcriptEl.replaceChildren(
      ...this.state.transcript.map((entry) => renderBubble(entry)),
    );
    if (this.state.pending) {
      const thinking = document.createElement("div");
      thinking.className = "bubble agent thinking";
      thinking.textContent = "Searching...";
      this.transcriptEl.appendChild(thinking);
    }
    this.syncControls();
  }

  private syncControls(): void {
    const ready = this.state.sessionId !== null && !this.state.pending;
    this.input.disabled = !ready;
    this.sendButton.disabled = !ready || this.input.value.trim() === "";
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status > 0 ? `${err.status}: ${err.message}` : err.message;
  }
  return String(err);
}

function renderBubble(entry: TranscriptEntry): HTMLElement {
  const bubble = document.createElement("div");
  bubble.className = `bubble ${entry.role}`;
  if (entry.degraded) bubble.classList.add("degraded");

  const text = document.createElement("p");
  text.className = "bubble-text";
  text.textContent = entry.text;
  bubble.appendChild(text);

  if (entry.degraded) {
    const note = document.createElement("p");
    note.className = "degraded-note";
    note.textContent = "Search budget exhausted: this answer may be incomplete.";
    bubble.appendChild(note);
  }

  if (entry.sources.length > 0) {
    const sources = document.createElement("div");
    sources.className = "sources";
    sources.append("Sources: ");
    for (const url of entry.sources) {
      const anchor = document.createElement("a");
      anchor.href = url;
      anchor.textContent = url;
      anchor.target = "_blank";
      anchor.rel = "noopener noreferrer";
      sources.appendChild(anchor);
    }
    bubble.appendChild(sources);
  }

  if (entry.trace.length > 0) {
    const details = document.createElement("details");
    details.className = "trace";
    const summary = document.createElement("summary");
    summary.textContent = `Tool calls (${entry.trace.length})`;
    details.appendChild(summary);
    const list = document.createElement("ul");
    for (const step of entry.trace) {
      const item = document.createElement("li");
      item.textContent = `${step.tool} ${JSON.stringify(step.arguments)} -> ${step.sources.length} source(s)`;
      list.appendChild(item);
    }
    details.appendChild(list);
    bubble.appendChild(details);
  }
  return bubble;
}
