// Thin adapter: replay a scene's draw operations on a 2D context.

import type { DrawOp } from "./scene.js";

export interface Context2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, start: number, end: number): void;
  fill(): void;
  stroke(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  save(): void;
  restore(): void;
  globalAlpha: number;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: string;
  textBaseline: string;
}

export function executeScene(ops: DrawOp[], ctx: Context2DLike): void {
  for (const op of ops) {
    switch (op.op) {
      case "clear":
        ctx.clearRect(0, 0, op.width, op.height);
        break;
      case "circle":
        ctx.save();
        ctx.globalAlpha = op.alpha;
        ctx.fillStyle = op.fill;
        ctx.strokeStyle = op.stroke;
        ctx.lineWidth = 1;
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.r, 0, 2 * Math.PI);
        ctx.fill();
        ctx.stroke();
        ctx.restore();
        break;
      case "rect":
        ctx.save();
        ctx.globalAlpha = op.alpha;
        ctx.fillStyle = op.fill;
        ctx.strokeStyle = op.stroke;
        ctx.lineWidth = 1;
        ctx.fillRect(op.x, op.y, op.w, op.h);
        ctx.strokeRect(op.x, op.y, op.w, op.h);
        ctx.restore();
        break;
      case "text":
        ctx.save();
        ctx.globalAlpha = 1;
        ctx.fillStyle = op.fill;
        ctx.font = `${op.px}px sans-serif`;
        ctx.textAlign = op.align;
        ctx.textBaseline = "middle";
        ctx.fillText(op.text, op.x, op.y);
        ctx.restore();
        break;
    }
  }
}
