/**
 * Exponential decay fitting: least squares on log(y) against t over the
 * trailing window of the series.  The early transient is not governed by
 * the slowest mode, so only the tail (default 80%) enters the fit.
 */

export interface DecayFit {
  /** decay rate (1/time): y ~ exp(intercept - rate * t) */
  rate: number;
  intercept: number;
  r_squared: number;
  /** fraction of the series used, measured from the end */
  window: number;
}

export function fitDecay(
  t: number[],
  y: number[],
  window = 0.8
): DecayFit {
  if (t.length !== y.length) {
    throw new Error("time and value columns differ in length");
  }
  if (!(window > 0 && window <= 1)) {
    throw new Error("window must lie in (0, 1]");
  }
  const tEnd = t[t.length - 1];
  const tStart = (1 - window) * tEnd;
  const ts: number[] = [];
  const logs: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (t[i] >= tStart && y[i] > 0 && Number.isFinite(y[i])) {
      ts.push(t[i]);
      logs.push(Math.log(y[i]));
    }
  }
  if (ts.length < 2) {
    throw new Error("not enough positive samples in the fit window");
  }

  const n = ts.length;
  let tMean = 0;
  let lMean = 0;
  for (let i = 0; i < n; i++) {
    tMean += ts[i];
    lMean += logs[i];
  }
  tMean /= n;
  lMean /= n;
  let stt = 0;
  let stl = 0;
  for (let i = 0; i < n; i++) {
    const dt = ts[i] - tMean;
    stt += dt * dt;
    stl += dt * (logs[i] - lMean);
  }
  if (stt === 0) {
    throw new Error("fit window has no time extent");
  }
  const slope = stl / stt;
  const intercept = lMean - slope * tMean;

  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < n; i++) {
    const fit = intercept + slope * ts[i];
    ssRes += (logs[i] - fit) ** 2;
    ssTot += (logs[i] - lMean) ** 2;
  }
  // a constant column (up to accumulation rounding, which can reach
  // ~n*eps in the mean) is a perfect fit with zero slope; without the
  // guard the 0/0 ratio turns into noise
  const degenerate =
    ssTot <= n ** 3 * Number.EPSILON ** 2 * (1 + lMean * lMean);
  const r2 = degenerate ? 1 : 1 - ssRes / ssTot;
  return {
    rate: -slope,
    intercept,
    r_squared: Math.max(0, Math.min(1, r2)),
    window,
  };
}
