/**
 * Canvas line chart: cumulative relevant found vs documents screened, one
 * point per completed batch, with a vertical marker where the strategy
 * stopped using novelty.
 *
 * The point count is mirrored onto data-points so the chart state is
 * observable without a 2D context (jsdom, tests, screen readers).
 */

import type { ChartPoint } from "./types.js";

export function renderChart(canvas: HTMLCanvasElement, points: ChartPoint[], total: number): void {
  canvas.dataset.points = String(points.length);
  const switchIndex = points.findIndex((p) => p.phase === "relevance_only");
  canvas.dataset.phaseSwitch = switchIndex >= 0 ? String(points[switchIndex]!.iteration) : "";

  // jsdom has no 2D canvas; the data attributes above still carry the state
  const headless = typeof navigator !== "undefined" && navigator.userAgent.includes("jsdom");
  let context: CanvasRenderingContext2D | null = null;
  if (!headless) {
    try {
      context = canvas.getContext("2d");
    } catch {
      context = null;
    }
  }
  if (!context) return;

  const width = canvas.width;
  const height = canvas.height;
  const pad = 28;
  context.clearRect(0, 0, width, height);
  context.strokeStyle = "#888";
  context.lineWidth = 1;
  context.strokeRect(pad, pad / 2, width - 1.5 * pad, height - 1.5 * pad);

  if (points.length === 0) return;
  const maxX = Math.max(total, points[points.length - 1]!.screened);
  const maxY = Math.max(1, ...points.map((p) => p.relevantFound));
  const toX = (screened: number) => pad + ((width - 1.5 * pad) * screened) / maxX;
  const toY = (relevant: number) => height - pad + (-(height - 1.5 * pad) * relevant) / maxY;

  // phase-switch marker at the first relevance-only batch
  if (switchIndex > 0) {
    const x = toX(points[switchIndex]!.screened);
    context.strokeStyle = "#d08000";
    context.setLineDash([4, 3]);
    context.beginPath();
    context.moveTo(x, pad / 2);
    context.lineTo(x, height - pad);
    context.stroke();
    context.setLineDash([]);
  }

  context.strokeStyle = "#2266cc";
  context.lineWidth = 2;
  context.beginPath();
  context.moveTo(toX(0), toY(0));
  for (const point of points) context.lineTo(toX(point.screened), toY(point.relevantFound));
  context.stroke();

  context.fillStyle = "#2266cc";
  for (const point of points) {
    context.beginPath();
    context.arc(toX(point.screened), toY(point.relevantFound), 3, 0, 2 * Math.PI);
    context.fill();
  }
}
