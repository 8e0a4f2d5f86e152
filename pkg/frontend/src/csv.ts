/**
 * Readers for the simulator's CSV artifacts.
 *
 * series.csv schema (one row per sample):
 *   t,mass_total,mass1,mass2,l2_zeta,l2_u,l2_h,linf_zeta,linf_u,linf_h,
 *   min_rho1,max_rho1,min_rho2,max_rho2,picard_iters
 */

export interface SeriesTable {
  header: string[];
  /** column name -> numeric column */
  columns: Map<string, number[]>;
  length: number;
}

export function parseCsv(text: string): SeriesTable {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new Error("CSV needs a header and at least one data row");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `CSV row has ${cells.length} cells, expected ${header.length}`
      );
    }
    cells.forEach((cell, i) => {
      columns.get(header[i])!.push(Number(cell));
    });
  }
  return { header, columns, length: lines.length - 1 };
}

export function column(table: SeriesTable, name: string): number[] {
  const col = table.columns.get(name);
  if (!col) {
    throw new Error(`CSV has no column '${name}'`);
  }
  return col;
}

/** Combined perturbation norm sqrt(l2_zeta^2 + l2_u^2 + l2_h^2). */
export function combinedNorm(table: SeriesTable): number[] {
  const z = column(table, "l2_zeta");
  const u = column(table, "l2_u");
  const h = column(table, "l2_h");
  return z.map((v, i) => Math.hypot(v, u[i], h[i]));
}

export interface SpectrumData {
  eigenvalues: Array<[number, number]>;
  zero_mode_count: number;
  decay_rate: number;
  spectral_abscissa_mean_zero: number;
}

export function parseSpectrum(text: string): SpectrumData {
  const raw = JSON.parse(text);
  if (!Array.isArray(raw.eigenvalues)) {
    throw new Error("spectrum.json is missing its eigenvalue list");
  }
  return raw as SpectrumData;
}

export interface ConvergenceRow {
  study: string;
  n: number;
  dt: number;
  l2_total: number;
  observed_order: number;
}

export function parseConvergence(text: string): ConvergenceRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  const header = lines[0].split(",");
  const idx = (name: string) => {
    const i = header.indexOf(name);
    if (i < 0) throw new Error(`convergence.csv has no column '${name}'`);
    return i;
  };
  const si = idx("study");
  const ni = idx("n");
  const di = idx("dt");
  const ei = idx("l2_total");
  const oi = idx("observed_order");
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    return {
      study: cells[si],
      n: Number(cells[ni]),
      dt: Number(cells[di]),
      l2_total: Number(cells[ei]),
      observed_order: Number(cells[oi]),
    };
  });
}
