/**
 * Report assembly: read the simulator artifacts from a directory, fit the
 * decay rates, render the plot set, and write summary.md.  Output depends
 * only on the input files, so re-rendering is byte-identical.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import {
  column,
  combinedNorm,
  parseConvergence,
  parseCsv,
  parseSpectrum,
  type SpectrumData,
} from "./csv.js";
import { fitDecay, type DecayFit } from "./fit.js";
import { COLORS, renderChart, type Series } from "./chart.js";

export interface ReportResult {
  written: string[];
  warnings: string[];
  fits: Record<string, DecayFit>;
  spectrumRate?: number;
}

function fmt(x: number, digits = 6): string {
  return Number.isFinite(x) ? x.toPrecision(digits) : String(x);
}

export function render(inDir: string, outDir: string, window = 0.8): ReportResult {
  const seriesPath = path.join(inDir, "series.csv");
  if (!fs.existsSync(seriesPath)) {
    throw new Error(`no series.csv in ${inDir}`);
  }
  fs.mkdirSync(outDir, { recursive: true });
  const warnings: string[] = [];
  const written: string[] = [];

  const table = parseCsv(fs.readFileSync(seriesPath, "utf8"));
  const t = column(table, "t");

  // decay fits on the combined norm and each component
  const fits: Record<string, DecayFit> = {
    combined: fitDecay(t, combinedNorm(table), window),
    l2_zeta: fitDecay(t, column(table, "l2_zeta"), window),
    l2_u: fitDecay(t, column(table, "l2_u"), window),
    l2_h: fitDecay(t, column(table, "l2_h"), window),
  };

  // plot 1: perturbation norms, log scale
  const normSeries: Series[] = [
    { x: t, y: combinedNorm(table), color: COLORS[3] },
    { x: t, y: column(table, "l2_zeta"), color: COLORS[0] },
    { x: t, y: column(table, "l2_u"), color: COLORS[1] },
    { x: t, y: column(table, "l2_h"), color: COLORS[2] },
  ];
  const normsPng = path.join(outDir, "norms.png");
  fs.writeFileSync(normsPng, renderChart(normSeries, { logY: true }));
  written.push(normsPng);

  // plot 2: conservation drift (relative mass errors)
  const drift = (name: string) => {
    const m = column(table, name);
    return m.map((v) => Math.abs(v - m[0]) / Math.abs(m[0]));
  };
  const conservationPng = path.join(outDir, "conservation.png");
  fs.writeFileSync(
    conservationPng,
    renderChart(
      [
        { x: t, y: drift("mass_total"), color: COLORS[0] },
        { x: t, y: drift("mass1"), color: COLORS[1] },
        { x: t, y: drift("mass2"), color: COLORS[2] },
      ],
      { logY: false }
    )
  );
  written.push(conservationPng);

  // plot 3: eigenvalue scatter, conserved modes marked distinctly
  let spectrum: SpectrumData | undefined;
  const spectrumPath = path.join(inDir, "spectrum.json");
  if (fs.existsSync(spectrumPath)) {
    spectrum = parseSpectrum(fs.readFileSync(spectrumPath, "utf8"));
    const zero: Array<[number, number]> = [];
    const damped: Array<[number, number]> = [];
    for (const [re, im] of spectrum.eigenvalues) {
      if (Math.hypot(re, im) < 1e-10) zero.push([re, im]);
      else damped.push([re, im]);
    }
    const eigPng = path.join(outDir, "eigenvalues.png");
    fs.writeFileSync(
      eigPng,
      renderChart(
        [
          {
            x: damped.map((p) => p[0]),
            y: damped.map((p) => p[1]),
            color: COLORS[0],
          },
        ],
        { scatterOnly: true, crossPoints: zero }
      )
    );
    written.push(eigPng);
  } else {
    warnings.push("spectrum.json not found: eigenvalue plot skipped");
  }

  // plot 4: convergence orders
  const convergencePath = path.join(inDir, "convergence.csv");
  if (fs.existsSync(convergencePath)) {
    const rows = parseConvergence(fs.readFileSync(convergencePath, "utf8"));
    const spatial = rows.filter((r) => r.study === "spatial");
    const temporal = rows.filter((r) => r.study === "temporal");
    const series: Series[] = [];
    if (spatial.length) {
      series.push({
        x: spatial.map((r) => Math.log10(r.n)),
        y: spatial.map((r) => r.l2_total),
        color: COLORS[0],
        markers: true,
      });
    }
    if (temporal.length) {
      series.push({
        x: temporal.map((r) => -Math.log10(r.dt)),
        y: temporal.map((r) => r.l2_total),
        color: COLORS[1],
        markers: true,
      });
    }
    const convergencePng = path.join(outDir, "convergence.png");
    fs.writeFileSync(convergencePng, renderChart(series, { logY: true }));
    written.push(convergencePng);
  } else {
    warnings.push("convergence.csv not found: convergence plot skipped");
  }

  // summary
  const lines: string[] = ["# mixtura run report", ""];
  if (warnings.length) {
    lines.push("## Warnings", "");
    for (const w of warnings) lines.push(`- ${w}`);
    lines.push("");
  }
  lines.push("## Decay fits", "");
  lines.push("| column | rate | intercept | r^2 | window |");
  lines.push("| --- | --- | --- | --- | --- |");
  for (const [name, fit] of Object.entries(fits)) {
    lines.push(
      `| ${name} | ${fmt(fit.rate)} | ${fmt(fit.intercept)} | ` +
        `${fmt(fit.r_squared, 8)} | ${fit.window} |`
    );
  }
  lines.push("");
  if (spectrum) {
    const rel =
      Math.abs(fits.combined.rate - spectrum.decay_rate) / spectrum.decay_rate;
    lines.push("## Spectrum", "");
    lines.push(`- zero modes: ${spectrum.zero_mode_count}`);
    lines.push(`- spectral decay rate: ${fmt(spectrum.decay_rate)}`);
    lines.push(
      `- fitted combined rate: ${fmt(fits.combined.rate)} ` +
        `(relative difference ${fmt(rel, 3)})`
    );
    lines.push("");
  }
  lines.push("## Conservation", "");
  const massDrift = drift("mass_total");
  lines.push(
    `- max relative total-mass drift: ${fmt(Math.max(...massDrift), 3)}`
  );
  lines.push("");
  lines.push("## Artifacts", "");
  for (const w of written) lines.push(`- ${path.basename(w)}`);
  lines.push("");

  const summaryPath = path.join(outDir, "summary.md");
  fs.writeFileSync(summaryPath, lines.join("\n"));
  written.push(summaryPath);

  return { written, warnings, fits, spectrumRate: spectrum?.decay_rate };
}
