/**
 * Phase-portrait composition: direction-field arrows scaled by velocity
 * magnitude, trajectories as blue curves, equilibria as green markers
 * (filled when stable, hollow otherwise).  Output is deterministic for
 * identical inputs.
 */

import { EquilibriumEntry, FieldDoc, TrajectoryDoc } from "./schema.js";
import { Attributes, document as svgDocument, element, fmt, text } from "./svg.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  axisLabels?: [string, string];
  title?: string;
}

export interface PlotInputs {
  field: FieldDoc;
  trajectories: TrajectoryDoc[];
  equilibria: EquilibriumEntry[];
}

const MARGIN = { left: 56, right: 16, top: 28, bottom: 48 };
const TRAJECTORY_COLOR = "#1f5fd0";
const MARKER_COLOR = "#1a9641";
const ARROW_COLOR = "#555555";

export interface Transform {
  plotWidth: number;
  plotHeight: number;
  toPixel(u: number, v: number): [number, number];
}

export function makeTransform(width: number, height: number): Transform {
  const plotWidth = width - MARGIN.left - MARGIN.right;
  const plotHeight = height - MARGIN.top - MARGIN.bottom;
  return {
    plotWidth,
    plotHeight,
    toPixel(u: number, v: number): [number, number] {
      return [MARGIN.left + u * plotWidth, MARGIN.top + (1 - v) * plotHeight];
    },
  };
}

function frame(tr: Transform, labels: [string, string]): string[] {
  const parts: string[] = [];
  const [x0, y1] = tr.toPixel(0, 0);
  const [x1, y0] = tr.toPixel(1, 1);
  parts.push(element("rect", {
    x: x0, y: y0, width: x1 - x0, height: y1 - y0,
    fill: "white", stroke: "#222222", "stroke-width": 1,
  }));
  for (let tick = 0; tick <= 5; tick += 1) {
    const value = tick / 5;
    const [tx, ty] = tr.toPixel(value, 0);
    parts.push(element("line", {
      x1: tx, y1: ty, x2: tx, y2: ty + 5, stroke: "#222222", "stroke-width": 1,
    }));
    parts.push(text(value.toFixed(1), {
      x: tx, y: ty + 18, "text-anchor": "middle", "font-size": 11, "font-family": "sans-serif",
    }));
    const [lx, ly] = tr.toPixel(0, value);
    parts.push(element("line", {
      x1: lx - 5, y1: ly, x2: lx, y2: ly, stroke: "#222222", "stroke-width": 1,
    }));
    parts.push(text(value.toFixed(1), {
      x: lx - 8, y: ly + 4, "text-anchor": "end", "font-size": 11, "font-family": "sans-serif",
    }));
  }
  const [cx, cy] = tr.toPixel(0.5, 0);
  parts.push(text(labels[0], {
    x: cx, y: cy + 36, "text-anchor": "middle", "font-size": 13, "font-family": "sans-serif",
  }));
  const [ax, ay] = tr.toPixel(0, 0.5);
  parts.push(text(labels[1], {
    x: ax - 40, y: ay, "text-anchor": "middle", "font-size": 13, "font-family": "sans-serif",
    transform: `rotate(-90 ${fmt(ax - 40)} ${fmt(ay)})`,
  }));
  return parts;
}

function arrows(field: FieldDoc, tr: Transform): string[] {
  const magnitudes = field.points.map((p) =>
    Math.hypot(p.velocity[0] ?? 0, p.velocity[1] ?? 0),
  );
  const maxMagnitude = Math.max(...magnitudes);
  if (maxMagnitude === 0) {
    return [];
  }
  // lattice spacing from the point count of a square grid
  const perAxis = Math.max(2, Math.round(Math.sqrt(field.points.length)));
  const cellPixels = Math.min(tr.plotWidth, tr.plotHeight) / (perAxis - 1);
  const scale = (0.9 * cellPixels) / maxMagnitude;
  const parts: string[] = [];
  field.points.forEach((point, index) => {
    const magnitude = magnitudes[index] ?? 0;
    if (magnitude === 0) {
      return;
    }
    const [u, v] = [point.state[0] ?? 0, point.state[1] ?? 0];
    const [px, py] = tr.toPixel(u, v);
    const dx = (point.velocity[0] ?? 0) * scale;
    const dy = -(point.velocity[1] ?? 0) * scale;
    const tipX = px + dx;
    const tipY = py + dy;
    parts.push(element("line", {
      x1: px, y1: py, x2: tipX, y2: tipY,
      stroke: ARROW_COLOR, "stroke-width": 1,
    }));
    const angle = Math.atan2(dy, dx);
    const headLength = Math.min(5, 3 + 2 * (magnitude / maxMagnitude));
    for (const side of [-1, 1]) {
      const theta = angle + Math.PI + (side * Math.PI) / 7;
      parts.push(element("line", {
        x1: tipX, y1: tipY,
        x2: tipX + headLength * Math.cos(theta),
        y2: tipY + headLength * Math.sin(theta),
        stroke: ARROW_COLOR, "stroke-width": 1,
      }));
    }
  });
  return parts;
}

function trajectoryCurves(trajectories: TrajectoryDoc[], tr: Transform): string[] {
  return trajectories.map((trajectory) => {
    const coordinates = trajectory.points
      .map((point) => {
        const [px, py] = tr.toPixel(point.state[0] ?? 0, point.state[1] ?? 0);
        return `${fmt(px)},${fmt(py)}`;
      })
      .join(" ");
    return element("polyline", {
      points: coordinates,
      fill: "none",
      stroke: TRAJECTORY_COLOR,
      "stroke-width": 1.6,
      opacity: 0.9,
    });
  });
}

function equilibriumMarkers(equilibria: EquilibriumEntry[], tr: Transform): string[] {
  return equilibria.map((equilibrium) => {
    const [u, v] = [equilibrium.state[0] ?? 0, equilibrium.state[1] ?? 0];
    const [px, py] = tr.toPixel(u, v);
    const stable = equilibrium.classification === "stable";
    const attributes: Attributes = {
      cx: px,
      cy: py,
      r: 6,
      stroke: MARKER_COLOR,
      "stroke-width": 2,
      fill: stable ? MARKER_COLOR : "white",
      "data-x": String(u),
      "data-y": String(v),
      "data-classification": equilibrium.classification,
    };
    return element("circle", attributes);
  });
}

export function render(inputs: PlotInputs, options: RenderOptions = {}): string {
  const width = options.width ?? 640;
  const height = options.height ?? 640;
  const tr = makeTransform(width, height);
  const labels: [string, string] = options.axisLabels ?? [
    inputs.field.axes[0] ?? "x",
    inputs.field.axes[1] ?? "y",
  ];
  const children: string[] = [];
  children.push(element("rect", { x: 0, y: 0, width, height, fill: "white" }));
  if (options.title) {
    children.push(text(options.title, {
      x: width / 2, y: 18, "text-anchor": "middle",
      "font-size": 14, "font-family": "sans-serif",
    }));
  }
  children.push(...frame(tr, labels));
  children.push(...arrows(inputs.field, tr));
  children.push(...trajectoryCurves(inputs.trajectories, tr));
  children.push(...equilibriumMarkers(inputs.equilibria, tr));
  return svgDocument(width, height, children);
}
