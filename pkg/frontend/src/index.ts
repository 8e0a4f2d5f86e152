export { fitDecay, type DecayFit } from "./fit.js";
export {
  parseCsv,
  column,
  combinedNorm,
  parseSpectrum,
  parseConvergence,
} from "./csv.js";
export { render, type ReportResult } from "./report.js";
export { encodePng, pngDimensions } from "./png.js";
export { renderChart, Canvas } from "./chart.js";
