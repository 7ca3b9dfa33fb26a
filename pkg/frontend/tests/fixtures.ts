import type { FrameMessage } from "../src/protocol.js";
import type { Transform } from "../src/transform.js";

// Identity mapping: a 1000x1000 canvas showing the default 1000-unit
// viewport, so screen coordinates equal world coordinates.
export const IDENTITY: Transform = { scale: 1, offsetX: 0, offsetY: 0 };

export const CANVAS_W = 1000;
export const CANVAS_H = 1000;

/** Scripted frame: a word at a known center, a second word, an
 * overlapping big/small pair, and one article card. */
export function scriptedFrame(): FrameMessage {
  return {
    type: "frame",
    tick: 42,
    agents: [
      { id: "soldier", label: "soldier", kind: "word", x: 120, y: 80, r: 30, stress: 0.5, freq: 9 },
      { id: "bragg", label: "bragg", kind: "word", x: 400, y: 300, r: 20, stress: 1.0, freq: 4 },
      { id: "big", label: "big", kind: "word", x: 500, y: 500, r: 100, stress: 0.0, freq: 7 },
      { id: "small", label: "small", kind: "word", x: 560, y: 500, r: 40, stress: 0.2, freq: 3 },
      { id: "article-1", label: "A headline", kind: "article", x: 800, y: 200, r: 60, stress: 0, freq: 0 },
    ],
    mean_speed: 0.041,
    stable: true,
  };
}

export function emptyFrame(): FrameMessage {
  return { type: "frame", tick: 0, agents: [], mean_speed: 0, stable: true };
}
