/** Canvas drawing: two horizontal strings with one ball each. */

import { positionToPixel } from "./mapping.js";

export interface SceneInput {
  humanX: number;
  vpX: number | null;
  statusMessage?: string;
}

const STRING_COLOR = "#888";
const HUMAN_COLOR = "#2b6cb0";
const VP_COLOR = "#c05621";
const BALL_RADIUS = 12;

export function drawScene(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  scene: SceneInput,
): void {
  ctx.clearRect(0, 0, width, height);
  const humanY = height * 0.7;
  const vpY = height * 0.3;

  for (const y of [humanY, vpY]) {
    ctx.strokeStyle = STRING_COLOR;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(positionToPixel(-0.5, width), y);
    ctx.lineTo(positionToPixel(0.5, width), y);
    ctx.stroke();
  }

  ctx.fillStyle = HUMAN_COLOR;
  ctx.beginPath();
  ctx.arc(positionToPixel(scene.humanX, width), humanY, BALL_RADIUS, 0, 2 * Math.PI);
  ctx.fill();

  if (scene.vpX !== null) {
    ctx.fillStyle = VP_COLOR;
    ctx.beginPath();
    ctx.arc(positionToPixel(scene.vpX, width), vpY, BALL_RADIUS, 0, 2 * Math.PI);
    ctx.fill();
  }

  if (scene.statusMessage) {
    ctx.fillStyle = "#b00";
    ctx.font = "14px sans-serif";
    ctx.fillText(scene.statusMessage, 10, 20);
  }
}
