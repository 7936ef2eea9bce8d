/**
 * The four standard figures from one or more trace CSVs.
 *
 *   fig1_tracking          output x1 against the reference it follows
 *   fig2_filter_control    filter outputs, virtual controls, actual input
 *   fig3_compensator       compensator states and compensated errors
 *   fig4_error_comparison  tracking error z1, one curve per supplied trace
 *
 * The first CSV is the primary trace for figures 1-3; figure 4 overlays
 * every supplied trace.
 */

import { readFileSync, writeFileSync, mkdirSync } from "fs";
import { join } from "path";

import { PALETTE, Series, renderChart } from "./chart";
import { Trace, column, parseTraceCsv, referenceSeries, stemOf } from "./trace";

export interface FigureReport {
  file: string;
  title: string;
  series: number;
  bytes: number;
}

export function loadTrace(path: string): Trace {
  return parseTraceCsv(readFileSync(path, "utf8"), stemOf(path));
}

function fig1Series(trace: Trace): Series[] {
  const t = column(trace, "t");
  return [
    { label: "x1", x: t, y: column(trace, "x1") },
    { label: "reference", x: t, y: referenceSeries(trace), dash: [6, 4] },
  ];
}

function fig2Series(trace: Trace): Series[] {
  const t = column(trace, "t");
  const out: Series[] = [];
  for (let i = 1; i < trace.n; i++) {
    out.push({ label: `alpha_${i}`, x: t, y: column(trace, `alpha_${i}`) });
    out.push({
      label: `alpha_hat_${i}`,
      x: t,
      y: column(trace, `alpha_hat_${i}`),
      dash: [6, 4],
    });
  }
  out.push({ label: "u", x: t, y: column(trace, "u"), width: 2.0 });
  return out;
}

function fig3Series(trace: Trace): Series[] {
  const t = column(trace, "t");
  const out: Series[] = [];
  for (let i = 1; i <= trace.n; i++) {
    out.push({ label: `zeta_${i}`, x: t, y: column(trace, `zeta_${i}`) });
  }
  for (let i = 1; i <= trace.n; i++) {
    out.push({ label: `s${i}`, x: t, y: column(trace, `s${i}`), dash: [6, 4] });
  }
  return out;
}

function fig4Series(traces: Trace[]): Series[] {
  return traces.map((tr, i) => ({
    label: tr.name,
    x: column(tr, "t"),
    y: column(tr, "z1"),
    color: PALETTE[i % PALETTE.length],
  }));
}

export function makeFigures(csvPaths: string[], outDir: string): FigureReport[] {
  if (csvPaths.length === 0) {
    throw new Error("need at least one trace CSV");
  }
  const traces = csvPaths.map(loadTrace);
  const primary = traces[0];
  mkdirSync(outDir, { recursive: true });

  const figures: Array<{ file: string; title: string; x: string; y: string; series: Series[] }> = [
    {
      file: "fig1_tracking.png",
      title: "Output tracking",
      x: "t [s]",
      y: "x1",
      series: fig1Series(primary),
    },
    {
      file: "fig2_filter_control.png",
      title: "Filter outputs, virtual controls, input",
      x: "t [s]",
      y: "signal",
      series: fig2Series(primary),
    },
    {
      file: "fig3_compensator.png",
      title: "Compensator states and compensated errors",
      x: "t [s]",
      y: "signal",
      series: fig3Series(primary),
    },
    {
      file: "fig4_error_comparison.png",
      title: "Tracking error z1 by variant",
      x: "t [s]",
      y: "z1",
      series: fig4Series(traces),
    },
  ];

  return figures.map((f) => {
    const png = renderChart({ title: f.title, xLabel: f.x, yLabel: f.y, series: f.series });
    const path = join(outDir, f.file);
    writeFileSync(path, png);
    return { file: path, title: f.title, series: f.series.length, bytes: png.length };
  });
}
