#!/usr/bin/env node
/**
 * mixtura-report --in <dir> --out <dir> [--window <fraction>]
 *
 * Reads series.csv (+ spectrum.json / convergence.csv when present) from
 * the input directory and writes the plot set and summary.md to the output
 * directory.  Exit codes: 0 success, 1 usage/input error.
 */

import { render } from "./report.js";

export function main(argv: string[]): number {
  let inDir: string | undefined;
  let outDir: string | undefined;
  let window = 0.8;
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--in":
        inDir = argv[++i];
        break;
      case "--out":
        outDir = argv[++i];
        break;
      case "--window":
        window = Number(argv[++i]);
        break;
      default:
        console.error(`unknown argument: ${argv[i]}`);
        return 1;
    }
  }
  if (!inDir || !outDir) {
    console.error("usage: mixtura-report --in <dir> --out <dir> [--window w]");
    return 1;
  }
  try {
    const result = render(inDir, outDir, window);
    for (const w of result.warnings) console.error(`warning: ${w}`);
    console.log(
      `wrote ${result.written.length} files, combined decay rate ` +
        `${result.fits.combined.rate.toPrecision(6)}`
    );
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
