// World <-> screen mapping: uniform scale plus translation, so circles stay
// circles regardless of canvas shape.

export interface Viewport {
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

export interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export const DEFAULT_VIEWPORT: Viewport = { xMin: 0, yMin: 0, xMax: 1000, yMax: 1000 };

/** Largest aspect-preserving fit of the viewport into a canvas, centered. */
export function fitViewport(viewport: Viewport, canvasWidth: number, canvasHeight: number): Transform {
  const worldW = viewport.xMax - viewport.xMin;
  const worldH = viewport.yMax - viewport.yMin;
  const scale = Math.min(canvasWidth / worldW, canvasHeight / worldH);
  return {
    scale,
    offsetX: (canvasWidth - scale * worldW) / 2 - scale * viewport.xMin,
    offsetY: (canvasHeight - scale * worldH) / 2 - scale * viewport.yMin,
  };
}

export function worldToScreen(t: Transform, x: number, y: number): { x: number; y: number } {
  return { x: t.offsetX + t.scale * x, y: t.offsetY + t.scale * y };
}

export function screenToWorld(t: Transform, x: number, y: number): { x: number; y: number } {
  return { x: (x - t.offsetX) / t.scale, y: (y - t.offsetY) / t.scale };
}
