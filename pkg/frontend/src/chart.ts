// Convergence chart: turns (labels, auc) points into SVG path data.

export interface ChartPoint {
  labels: number;
  auc: number;
}

export interface ChartLayout {
  width: number;
  height: number;
  padding: number;
}

export const DEFAULT_LAYOUT: ChartLayout = { width: 480, height: 180, padding: 24 };

/** Map a point into pixel space. AUC axis is fixed to [0.5, 1.0]. */
export function toPixel(
  p: ChartPoint,
  xMax: number,
  layout: ChartLayout = DEFAULT_LAYOUT,
): { x: number; y: number } {
  const innerW = layout.width - 2 * layout.padding;
  const innerH = layout.height - 2 * layout.padding;
  const fx = xMax > 0 ? p.labels / xMax : 0;
  const fy = (Math.min(1, Math.max(0.5, p.auc)) - 0.5) / 0.5;
  return {
    x: layout.padding + fx * innerW,
    y: layout.height - layout.padding - fy * innerH,
  };
}

/** SVG polyline "points" attribute for the series, or "" when empty. */
export function polylinePoints(
  points: ChartPoint[],
  layout: ChartLayout = DEFAULT_LAYOUT,
): string {
  if (points.length === 0) return "";
  const xMax = Math.max(...points.map((p) => p.labels));
  return points
    .map((p) => {
      const { x, y } = toPixel(p, xMax, layout);
      return `${round2(x)},${round2(y)}`;
    })
    .join(" ");
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

/** Render the chart into an <svg> element. */
export function renderChart(
  svg: SVGSVGElement,
  points: ChartPoint[],
  layout: ChartLayout = DEFAULT_LAYOUT,
): void {
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.innerHTML = "";
  const ns = "http://www.w3.org/2000/svg";

  const axis = document.createElementNS(ns, "polyline");
  const p = layout.padding;
  axis.setAttribute(
    "points",
    `${p},${p} ${p},${layout.height - p} ${layout.width - p},${layout.height - p}`,
  );
  axis.setAttribute("class", "axis");
  axis.setAttribute("fill", "none");
  svg.appendChild(axis);

  if (points.length === 0) {
    const label = document.createElementNS(ns, "text");
    label.setAttribute("x", String(layout.width / 2));
    label.setAttribute("y", String(layout.height / 2));
    label.setAttribute("text-anchor", "middle");
    label.textContent = "no metrics yet";
    svg.appendChild(label);
    return;
  }

  const line = document.createElementNS(ns, "polyline");
  line.setAttribute("points", polylinePoints(points, layout));
  line.setAttribute("class", "series");
  line.setAttribute("fill", "none");
  svg.appendChild(line);
}
