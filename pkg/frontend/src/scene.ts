// Pure scene construction: a frame plus a transform becomes an ordered list
// of primitive draw operations. Identical inputs produce identical scenes;
// the canvas adapter just replays the list.

import type { FrameAgent, FrameMessage } from "./protocol.js";
import { type Transform, worldToScreen } from "./transform.js";

export const CIRCLE_ALPHA = 0.45; // fixed so overlapping lenses visibly darken
export const MIN_LABEL_PX = 11;
export const MAX_LABEL_PX = 28;

export type DrawOp =
  | { op: "clear"; width: number; height: number }
  | {
      op: "circle";
      x: number;
      y: number;
      r: number;
      fill: string;
      alpha: number;
      stroke: string;
    }
  | { op: "rect"; x: number; y: number; w: number; h: number; fill: string; alpha: number; stroke: string }
  | { op: "text"; x: number; y: number; text: string; px: number; fill: string; align: "center" | "left" };

/** Red channel rises with stress; green/blue stay fixed and low. */
export function wordFill(stress: number): string {
  const red = Math.round(255 * Math.min(1, Math.max(0, stress)));
  return `rgb(${red},84,122)`;
}

export function labelPx(screenRadius: number): number {
  return Math.min(MAX_LABEL_PX, Math.max(MIN_LABEL_PX, 0.45 * screenRadius));
}

/** Words drawn largest-first so small circles stay on top and clickable;
 * article cards drawn after every word (topmost). */
export function drawOrder(agents: FrameAgent[]): FrameAgent[] {
  const words = agents.filter((a) => a.kind === "word");
  const articles = agents.filter((a) => a.kind === "article");
  words.sort((a, b) => b.r - a.r || (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
  return [...words, ...articles];
}

export function cardSize(agent: FrameAgent, t: Transform): { w: number; h: number } {
  const w = 2 * agent.r * t.scale;
  return { w, h: 0.6 * w };
}

export function buildScene(
  frame: FrameMessage,
  t: Transform,
  canvasWidth: number,
  canvasHeight: number,
  stabilityThreshold = 0.05,
): DrawOp[] {
  const ops: DrawOp[] = [{ op: "clear", width: canvasWidth, height: canvasHeight }];
  const ordered = drawOrder(frame.agents);

  for (const agent of ordered) {
    const p = worldToScreen(t, agent.x, agent.y);
    if (agent.kind === "word") {
      ops.push({
        op: "circle",
        x: p.x,
        y: p.y,
        r: agent.r * t.scale,
        fill: wordFill(agent.stress),
        alpha: CIRCLE_ALPHA,
        stroke: "#2a2a2a",
      });
    } else {
      const { w, h } = cardSize(agent, t);
      ops.push({
        op: "rect",
        x: p.x - w / 2,
        y: p.y - h / 2,
        w,
        h,
        fill: "#fdf6e3",
        alpha: 0.92,
        stroke: "#555555",
      });
    }
  }
  for (const agent of ordered) {
    const p = worldToScreen(t, agent.x, agent.y);
    ops.push({
      op: "text",
      x: p.x,
      y: p.y,
      text: agent.label,
      px: labelPx(agent.r * t.scale),
      fill: "#111111",
      align: "center",
    });
  }

  const stable = frame.stable;
  ops.push({
    op: "rect",
    x: 8,
    y: canvasHeight - 26,
    w: 12,
    h: 12,
    fill: stable ? "#2e8b57" : "#cc8400",
    alpha: 1,
    stroke: "#333333",
  });
  ops.push({
    op: "text",
    x: 26,
    y: canvasHeight - 17,
    text: `mean speed ${frame.mean_speed.toFixed(3)} / ${stabilityThreshold} ${stable ? "(steady)" : "(moving)"}`,
    px: 12,
    fill: "#333333",
    align: "left",
  });
  return ops;
}
