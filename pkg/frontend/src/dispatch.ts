// User actions become protocol messages; nothing here mutates layout state.

import type { ClientMessage, FrameMessage } from "./protocol.js";
import { hitTest } from "./hittest.js";
import { type Transform, screenToWorld } from "./transform.js";

export function openArticleMessage(word: string, worldX: number, worldY: number): ClientMessage {
  return { type: "open_article", word, x: worldX, y: worldY };
}

export function closeArticleMessage(id: string): ClientMessage {
  return { type: "close_article", id };
}

/** null for an empty/whitespace query: nothing is sent, the form shows
 * inline validation instead. */
export function setQueryMessage(raw: string | string[]): ClientMessage | null {
  const terms = (Array.isArray(raw) ? raw : raw.split(/\s+/)).map((t) => t.trim()).filter(Boolean);
  if (terms.length === 0) {
    return null;
  }
  return { type: "set_query", terms };
}

/** Canvas click to message: word click opens its article at the click
 * point (world units); modifier-click on a word is a semantic zoom that
 * re-queries the stream for that word; article cards and empty space do
 * nothing here. */
export function actionForClick(
  frame: FrameMessage,
  t: Transform,
  screenX: number,
  screenY: number,
  modifier: boolean,
): ClientMessage | null {
  const target = hitTest(screenX, screenY, frame, t);
  if (target === null || target.kind !== "word") {
    return null;
  }
  if (modifier) {
    return setQueryMessage([target.id]);
  }
  const world = screenToWorld(t, screenX, screenY);
  return openArticleMessage(target.id, world.x, world.y);
}
