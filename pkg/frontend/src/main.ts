// Browser bootstrap: wire the canvas, the query form, and the article
// panels to a reconnecting session client. All motion comes from server
// frames; rendering is coalesced to the animation cadence so stale frames
// are simply skipped.

import { executeScene } from "./canvas.js";
import { SessionClient } from "./client.js";
import { actionForClick, closeArticleMessage, setQueryMessage } from "./dispatch.js";
import type { ArticleMessage, FrameMessage } from "./protocol.js";
import { buildScene } from "./scene.js";
import { DEFAULT_VIEWPORT, type Transform, fitViewport } from "./transform.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function start(): void {
  const canvas = byId<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    throw new Error("2d canvas unavailable");
  }
  const statusEl = byId<HTMLSpanElement>("connection");
  const queryForm = byId<HTMLFormElement>("query-form");
  const queryInput = byId<HTMLInputElement>("query-input");
  const queryHint = byId<HTMLSpanElement>("query-hint");
  const panels = byId<HTMLDivElement>("panels");

  let latest: FrameMessage | null = null;
  let rendered: FrameMessage | null = null;
  let transform: Transform = fitViewport(DEFAULT_VIEWPORT, canvas.width, canvas.height);

  function resize(): void {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    transform = fitViewport(DEFAULT_VIEWPORT, canvas.width, canvas.height);
    rendered = null;
  }
  window.addEventListener("resize", resize);

  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const client = new SessionClient(`${scheme}://${location.host}/session`, {
    onMessage: (message) => {
      if (message.type === "frame") {
        latest = message;
      } else if (message.type === "article") {
        showArticle(message);
      } else if (message.type === "error") {
        queryHint.textContent = message.message;
      }
    },
    onStatus: (state) => {
      statusEl.textContent = state;
      statusEl.className = state;
    },
  });

  function showArticle(article: ArticleMessage): void {
    const panel = document.createElement("div");
    panel.className = "panel";
    panel.dataset.agent = article.id;
    const heading = document.createElement("h3");
    heading.textContent = article.title || article.id;
    const source = document.createElement("p");
    source.className = "source";
    source.textContent = article.source;
    const body = document.createElement("p");
    body.textContent = article.text;
    const close = document.createElement("button");
    close.textContent = "close";
    close.addEventListener("click", () => {
      client.send(closeArticleMessage(article.id));
      panel.remove();
    });
    panel.append(close, heading, source, body);
    panels.append(panel);
  }

  canvas.addEventListener("click", (event) => {
    if (latest === null) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    const x = event.clientX - rect.left;
    const y = event.clientY - rect.top;
    const message = actionForClick(latest, transform, x, y, event.ctrlKey || event.metaKey);
    if (message !== null) {
      client.send(message);
      if (message.type === "set_query") {
        queryInput.value = message.terms.join(" ");
      }
    }
  });

  queryForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const message = setQueryMessage(queryInput.value);
    if (message === null) {
      queryHint.textContent = "enter at least one term";
      return;
    }
    queryHint.textContent = "";
    client.send(message);
  });

  function paint(): void {
    if (latest !== null && latest !== rendered) {
      executeScene(buildScene(latest, transform, canvas.width, canvas.height), ctx!);
      rendered = latest;
    }
    requestAnimationFrame(paint);
  }

  resize();
  client.connect();
  requestAnimationFrame(paint);
}

start();
