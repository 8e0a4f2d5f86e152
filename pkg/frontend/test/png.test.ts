import { inflateSync } from "node:zlib";

import { describe, expect, it } from "vitest";

import { Canvas, renderChart } from "../src/chart.js";
import { encodePng, pngDimensions } from "../src/png.js";

describe("encodePng", () => {
  it("produces a decodable header and exact pixel payload", () => {
    const w = 3;
    const h = 2;
    const rgba = new Uint8Array(w * h * 4);
    rgba.fill(7);
    const buf = encodePng(w, h, rgba);
    expect(buf.subarray(0, 8)).toEqual(
      Buffer.from([137, 80, 78, 71, 13, 10, 26, 10])
    );
    expect(pngDimensions(buf)).toEqual({ width: 3, height: 2 });
    // IDAT starts after signature(8) + IHDR chunk(12 + 13)
    const idatLen = buf.readUInt32BE(33);
    const idat = buf.subarray(41, 41 + idatLen);
    const raw = inflateSync(idat);
    expect(raw.length).toBe((w * 4 + 1) * h); // filter byte per scanline
    expect(raw[0]).toBe(0);
    expect(raw[1]).toBe(7);
  });

  it("validates the buffer size", () => {
    expect(() => encodePng(2, 2, new Uint8Array(3))).toThrow();
  });
});

describe("Canvas", () => {
  it("draws clipped pixels and lines", () => {
    const c = new Canvas(10, 10);
    c.set(-1, 5, [0, 0, 0]); // silently clipped
    c.line(0, 0, 9, 9, [10, 20, 30]);
    const i = (5 * 10 + 5) * 4;
    expect(Array.from(c.data.subarray(i, i + 3))).toEqual([10, 20, 30]);
  });

  it("renders deterministic charts", () => {
    const series = [{ x: [0, 1, 2], y: [1, 0.5, 0.25] }];
    const a = renderChart(series, { logY: true });
    const b = renderChart(series, { logY: true });
    expect(a.equals(b)).toBe(true);
    expect(pngDimensions(a).width).toBe(640);
  });
});
