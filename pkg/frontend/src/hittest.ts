// Hit testing mirrors draw order: article cards are topmost, then words
// with smaller circles (drawn last) taking precedence inside overlaps.

import type { FrameAgent, FrameMessage } from "./protocol.js";
import { cardSize, drawOrder } from "./scene.js";
import { type Transform, screenToWorld, worldToScreen } from "./transform.js";

export function hitTest(
  screenX: number,
  screenY: number,
  frame: FrameMessage,
  t: Transform,
): FrameAgent | null {
  const world = screenToWorld(t, screenX, screenY);
  const ordered = drawOrder(frame.agents);
  for (let i = ordered.length - 1; i >= 0; i--) {
    const agent = ordered[i];
    if (agent.kind === "article") {
      const p = worldToScreen(t, agent.x, agent.y);
      const { w, h } = cardSize(agent, t);
      if (
        screenX >= p.x - w / 2 &&
        screenX <= p.x + w / 2 &&
        screenY >= p.y - h / 2 &&
        screenY <= p.y + h / 2
      ) {
        return agent;
      }
    } else {
      const dx = world.x - agent.x;
      const dy = world.y - agent.y;
      if (dx * dx + dy * dy <= agent.r * agent.r) {
        return agent;
      }
    }
  }
  return null;
}
