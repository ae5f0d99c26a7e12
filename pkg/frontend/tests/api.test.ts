import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, expect, test } from "vitest";

import {
  SphereshapeError,
  TrellisHandle,
  analyzeCodebook,
  buildTrellis,
  deshape,
  deshapeIndex,
  optimizeDistribution,
  quantizeWeights,
  shape,
  shapeIndex,
} from "../src/index.js";

const scratch = mkdtempSync(join(tmpdir(), "sphereshape-api-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

function maxwellBoltzmann(lambda: number): { amplitudes: number[]; probs: number[] } {
  const amplitudes = [1, 3, 5, 7];
  const raw = amplitudes.map((a) => Math.exp(-lambda * a * a));
  const z = raw.reduce((s, v) => s + v, 0);
  return { amplitudes, probs: raw.map((v) => v / z) };
}

function toyHandle(): TrellisHandle {
  return buildTrellis(
    { amplitudes: [1, 3, 5, 7], weights: [0, 1, 3, 6] },
    2,
    { lMax: 3, cachePath: join(scratch, "toy.sst") },
  );
}

test("quantizeWeights matches the worked examples", () => {
  const dist = { amplitudes: [1, 3, 5, 7], probs: [0.4, 0.3, 0.2, 0.1] };
  expect(quantizeWeights(dist, 10, { logBase: "e", absolute: true })).toEqual({
    amplitudes: [1, 3, 5, 7],
    weights: [0, 3, 7, 14],
  });
  expect(quantizeWeights(maxwellBoltzmann(0.1), 3.0)).toEqual({
    amplitudes: [1, 3, 5, 7],
    weights: [0, 3, 10, 21],
  });
});

test("buildTrellis reports the cache metadata", () => {
  const toy = toyHandle();
  expect(toy.n).toBe(2);
  expect(toy.lMax).toBe(3);
  expect(toy.numLevels).toBe(4);
  expect(toy.t00Bits).toBe(3);
  expect(toy.maxPayloadBits).toBe(2);
  expect(toy.numSequences).toBe(6n);
});

test("payload framing round trips above double precision", () => {
  const handle = buildTrellis(
    { amplitudes: [1, 3, 5, 7], weights: [0, 2, 5, 9] },
    64,
    { kBits: 96, cachePath: join(scratch, "wide.sst") },
  );
  const payload = new Uint8Array(12);
  for (let i = 0; i < payload.length; i++) {
    payload[i] = (i * 37 + 11) & 0xff;
  }
  const sequence = shape(handle, payload, 96);
  expect(sequence).toHaveLength(64);
  expect(deshape(handle, sequence, 96)).toEqual(payload);

  const index = 2n ** 95n + 12345678901234567890n;
  expect(deshapeIndex(handle, shapeIndex(handle, index))).toBe(index);
});

test("zero-bit payload maps to the lowest-weight sequence", () => {
  const toy = toyHandle();
  expect(shape(toy, new Uint8Array(0), 0)).toEqual([1, 1]);
  expect(deshape(toy, [1, 1], 0)).toEqual(new Uint8Array(0));
});

test("payload length must match the framing", () => {
  const toy = toyHandle();
  expect(() => shape(toy, new Uint8Array(2), 2)).toThrow(RangeError);
  expect(() => shape(toy, new Uint8Array(0), 2)).toThrow(RangeError);
});

test("errors carry the CLI category", () => {
  const toy = toyHandle();
  try {
    shapeIndex(toy, 6n);
    expect.unreachable("index 6 is out of range");
  } catch (err) {
    expect(err).toBeInstanceOf(SphereshapeError);
    expect((err as SphereshapeError).category).toBe("invalid-input");
    expect((err as SphereshapeError).exitCode).toBe(3);
  }

  try {
    buildTrellis(
      { amplitudes: [1, 3, 5, 7], weights: [0, 1, 3, 6] },
      4,
      { kBits: 99, cachePath: join(scratch, "never.sst") },
    );
    expect.unreachable("99 bits over 4 symbols is infeasible");
  } catch (err) {
    expect((err as SphereshapeError).category).toBe("infeasible-rate");
  }

  try {
    optimizeDistribution(18, { maxIter: 1, tol: 1e-15 });
    expect.unreachable("one iteration cannot converge");
  } catch (err) {
    expect((err as SphereshapeError).category).toBe("no-convergence");
  }

  expect(() => quantizeWeights(maxwellBoltzmann(0.1), -1)).toThrow(
    SphereshapeError,
  );
  expect(() => buildTrellis({ amplitudes: [1], weights: [0] }, 2, {})).toThrow(
    RangeError,
  );
});

test("analyzeCodebook parses the report", () => {
  const dist = maxwellBoltzmann(0.1);
  const handle = buildTrellis(quantizeWeights(dist, 3.0), 16, {
    kBits: 20,
    cachePath: join(scratch, "report.sst"),
  });

  const report = analyzeCodebook(handle, { kBits: 20, dist });
  expect(report.n).toBe(16);
  expect(report.k_bits).toBe(20);
  expect(report.rate_bits).toBeCloseTo(1.25, 12);
  const total = Object.values(report.amplitude_freqs).reduce((s, v) => s + v, 0);
  expect(total).toBeCloseTo(1.0, 9);
  expect(report.divergence_bits).not.toBeNull();
  expect(report.divergence_bits!).toBeGreaterThanOrEqual(0);
  expect(report.rate_loss_bits).not.toBeNull();

  const bare = analyzeCodebook(handle);
  expect(bare.k_bits).toBe(handle.maxPayloadBits);
  expect(bare.divergence_bits).toBeNull();
  expect(bare.rate_loss_bits).toBeNull();
});

test("optimizeDistribution favors the peak amplitude", () => {
  const dist = optimizeDistribution(18);
  expect(dist.amplitudes).toEqual([1, 3, 5, 7]);
  const total = dist.probs.reduce((s, v) => s + v, 0);
  expect(total).toBeCloseTo(1.0, 9);
  expect(dist.probs[3]).toBeGreaterThan(dist.probs[0]);
});
