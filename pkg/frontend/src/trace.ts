/**
 * Trace-CSV reader for the simulator's output contract.
 *
 * One row per grid point, fixed column order:
 *   t, x1..xn, u, alpha_1..alpha_{n-1}, alpha_hat_1..alpha_hat_{n-1},
 *   zeta_1..zeta_n, z1..zn, s1..sn, mu, sigma_1..sigma_n, V0, Vn
 *
 * The system order n is inferred from the x-columns and the full header is
 * validated against the contract before any numbers are parsed.
 */

import { basename } from "path";

export class TraceFormatError extends Error {}

export interface Trace {
  /** label used in legends; the file stem by default */
  name: string;
  /** system order */
  n: number;
  /** column name -> values, one entry per header column */
  columns: Map<string, number[]>;
  /** number of data rows */
  length: number;
}

export function traceColumns(n: number): string[] {
  const cols = ["t"];
  for (let i = 1; i <= n; i++) cols.push(`x${i}`);
  cols.push("u");
  for (let i = 1; i < n; i++) cols.push(`alpha_${i}`);
  for (let i = 1; i < n; i++) cols.push(`alpha_hat_${i}`);
  for (let i = 1; i <= n; i++) cols.push(`zeta_${i}`);
  for (let i = 1; i <= n; i++) cols.push(`z${i}`);
  for (let i = 1; i <= n; i++) cols.push(`s${i}`);
  cols.push("mu");
  for (let i = 1; i <= n; i++) cols.push(`sigma_${i}`);
  cols.push("V0", "Vn");
  return cols;
}

export function parseTraceCsv(text: string, name: string): Trace {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new TraceFormatError(`${name}: file is empty`);
  }
  const header = lines[0].split(",");
  const n = header.filter((c) => /^x\d+$/.test(c)).length;
  const expected = traceColumns(n);
  if (n < 2 || header.length !== expected.length) {
    throw new TraceFormatError(
      `${name}: header does not match the trace contract (order ${n})`
    );
  }
  for (let i = 0; i < expected.length; i++) {
    if (header[i] !== expected[i]) {
      throw new TraceFormatError(
        `${name}: missing or misplaced column '${expected[i]}' (found '${header[i]}')`
      );
    }
  }
  if (lines.length === 1) {
    throw new TraceFormatError(`${name}: no data rows`);
  }

  const columns = new Map<string, number[]>(expected.map((c) => [c, []]));
  for (let r = 1; r < lines.length; r++) {
    const cells = lines[r].split(",");
    if (cells.length !== expected.length) {
      throw new TraceFormatError(`${name}: row ${r} has ${cells.length} cells`);
    }
    for (let c = 0; c < cells.length; c++) {
      const v = Number(cells[c]);
      if (Number.isNaN(v) && cells[c] !== "nan") {
        throw new TraceFormatError(`${name}: non-numeric cell at row ${r}: '${cells[c]}'`);
      }
      columns.get(expected[c])!.push(v);
    }
  }
  return { name, n, columns, length: lines.length - 1 };
}

export function column(trace: Trace, name: string): number[] {
  const col = trace.columns.get(name);
  if (col === undefined) {
    throw new TraceFormatError(`${trace.name}: missing column '${name}'`);
  }
  return col;
}

/** Reference trajectory recovered from the contract: xd = x1 - z1. */
export function referenceSeries(trace: Trace): number[] {
  const x1 = column(trace, "x1");
  const z1 = column(trace, "z1");
  return x1.map((v, i) => v - z1[i]);
}

export function stemOf(path: string): string {
  return basename(path).replace(/\.[^.]+$/, "");
}
