import { describe, expect, it } from "vitest";

import { formatTick, renderChart, ticks } from "../src/chart";

const PNG_MAGIC = Buffer.from([0x89, 0x50, 0x4e, 0x47]);

describe("ticks", () => {
  it("covers the range with round steps", () => {
    const tk = ticks(0, 10);
    expect(tk[0]).toBeGreaterThanOrEqual(0);
    expect(tk[tk.length - 1]).toBeLessThanOrEqual(10 + 1e-9);
    expect(tk).toContain(0);
    expect(tk.length).toBeGreaterThanOrEqual(4);
  });

  it("uses 1-2-5 style steps", () => {
    for (const [lo, hi] of [[0, 1], [-3, 7], [0.001, 0.0017], [-2000, 5000]] as const) {
      const tk = ticks(lo, hi);
      const step = tk[1] - tk[0];
      const mantissa = step / Math.pow(10, Math.floor(Math.log10(step)));
      expect([1, 2, 5, 10]).toContainEqual(Number(mantissa.toPrecision(6)));
    }
  });

  it("handles degenerate ranges", () => {
    const tk = ticks(3, 3);
    expect(tk.length).toBeGreaterThan(0);
  });
});

describe("formatTick", () => {
  it("keeps small integers plain and extremes exponential", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(2.5)).toBe("2.5");
    expect(formatTick(12345678)).toBe("1.2e+7");
    expect(formatTick(0.00004)).toBe("4.0e-5");
  });
});

describe("renderChart", () => {
  const spec = {
    title: "demo",
    xLabel: "t",
    yLabel: "y",
    series: [
      { label: "a", x: [0, 1, 2], y: [0, 1, 0] },
      { label: "b", x: [0, 1, 2], y: [1, 0, 1], dash: [4, 3] },
    ],
  };

  it("produces a PNG", () => {
    const png = renderChart(spec);
    expect(png.length).toBeGreaterThan(1000);
    expect(png.subarray(0, 4).equals(PNG_MAGIC)).toBe(true);
  });

  it("is deterministic", () => {
    expect(renderChart(spec).equals(renderChart(spec))).toBe(true);
  });

  it("rejects an empty series list", () => {
    expect(() => renderChart({ ...spec, series: [] })).toThrow(/no series/);
  });

  it("survives non-finite samples by breaking the line", () => {
    const png = renderChart({
      ...spec,
      series: [{ label: "a", x: [0, 1, 2, 3], y: [0, Number.NaN, 1, 0.5] }],
    });
    expect(png.subarray(0, 4).equals(PNG_MAGIC)).toBe(true);
  });
});
