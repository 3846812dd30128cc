import { describe, expect, it } from "vitest";

import { ChartLayout, polylinePoints, toPixel } from "./chart.js";

const layout: ChartLayout = { width: 100, height: 60, padding: 10 };

describe("toPixel", () => {
  it("maps the extremes of both axes onto the plot corners", () => {
    expect(toPixel({ labels: 0, auc: 0.5 }, 50, layout)).toEqual({ x: 10, y: 50 });
    expect(toPixel({ labels: 50, auc: 1.0 }, 50, layout)).toEqual({ x: 90, y: 10 });
  });

  it("clamps auc into [0.5, 1]", () => {
    expect(toPixel({ labels: 0, auc: 0.2 }, 10, layout).y).toBe(50);
    expect(toPixel({ labels: 0, auc: 1.3 }, 10, layout).y).toBe(10);
  });

  it("interpolates linearly in between", () => {
    const p = toPixel({ labels: 25, auc: 0.75 }, 50, layout);
    expect(p.x).toBeCloseTo(50);
    expect(p.y).toBeCloseTo(30);
  });

  it("tolerates an all-zero x range", () => {
    expect(toPixel({ labels: 0, auc: 0.5 }, 0, layout).x).toBe(10);
  });
});

describe("polylinePoints", () => {
  it("is empty for no data", () => {
    expect(polylinePoints([], layout)).toBe("");
  });

  it("joins pixel pairs with spaces", () => {
    const pts = polylinePoints(
      [
        { labels: 10, auc: 0.5 },
        { labels: 20, auc: 1.0 },
      ],
      layout,
    );
    expect(pts).toBe("50,50 90,10");
  });

  it("scales x by the largest label count", () => {
    const pts = polylinePoints(
      [
        { labels: 0, auc: 0.5 },
        { labels: 100, auc: 0.5 },
      ],
      layout,
    );
    expect(pts.split(" ")[1]).toBe("90,50");
  });
});
