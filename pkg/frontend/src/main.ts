/**
 * Batch figure generation from simulator trace CSVs.
 *
 * Usage:
 *   node dist/main.js --csv trace.csv [--csv other.csv ...] --out figures/
 */

import { parseArgs } from "util";

import { makeFigures } from "./figures";
import { TraceFormatError } from "./trace";

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        csv: { type: "string", multiple: true },
        out: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  if (parsed.values.help) {
    console.log("usage: plot-traces --csv TRACE.csv [--csv MORE.csv ...] --out DIR");
    return 0;
  }
  const csvs = parsed.values.csv ?? [];
  const out = parsed.values.out;
  if (csvs.length === 0 || !out) {
    console.error("error: need at least one --csv and an --out directory");
    return 2;
  }
  try {
    const reports = makeFigures(csvs, out);
    for (const r of reports) {
      console.log(`${r.file}  (${r.series} series, ${r.bytes} bytes)`);
    }
    return 0;
  } catch (err) {
    if (err instanceof TraceFormatError || err instanceof Error) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
