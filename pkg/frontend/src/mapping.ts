/**
 * Pointer/canvas <-> arena coordinate mapping.
 *
 * The arena is the interval [-0.5, 0.5]. The mapping is linear over the
 * canvas width minus a 5% margin on each side; positions are clamped to
 * the arena so the balls never leave the rendered string.
 */

export const ARENA_MIN = -0.5;
export const ARENA_MAX = 0.5;
export const MARGIN_FRACTION = 0.05;

export function clampPosition(x: number): number {
  if (Number.isNaN(x)) return 0;
  return Math.min(ARENA_MAX, Math.max(ARENA_MIN, x));
}

/** Map a pointer pixel x on a canvas of the given width to the arena. */
export function pointerToPosition(pixelX: number, canvasWidth: number): number {
  if (canvasWidth <= 0) throw new RangeError("canvas width must be positive");
  const margin = MARGIN_FRACTION * canvasWidth;
  const usable = canvasWidth - 2 * margin;
  const fraction = (pixelX - margin) / usable;
  return clampPosition(ARENA_MIN + fraction * (ARENA_MAX - ARENA_MIN));
}

/** Map an arena position to the pixel x where the ball is drawn. */
export function positionToPixel(x: number, canvasWidth: number): number {
  if (canvasWidth <= 0) throw new RangeError("canvas width must be positive");
  const margin = MARGIN_FRACTION * canvasWidth;
  const usable = canvasWidth - 2 * margin;
  const fraction = (clampPosition(x) - ARENA_MIN) / (ARENA_MAX - ARENA_MIN);
  return margin + fraction * usable;
}
