import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { z } from "zod";

import {
  bigIntToBytes,
  bytesToBigInt,
  payloadByteLength,
  runCli,
} from "./core.js";

export {
  SphereshapeError,
  cliBinary,
  runCli,
  payloadByteLength,
  bytesToBigInt,
  bigIntToBytes,
  paddedHex,
} from "./core.js";
export type { ErrorCategory } from "./core.js";

export interface TargetDistribution {
  amplitudes: number[];
  probs: number[];
}

export interface WeightedAlphabet {
  amplitudes: number[];
  weights: number[];
}

const alphabetSchema = z.object({
  amplitudes: z.array(z.number().int()),
  weights: z.array(z.number().int().nonnegative()),
});

const distributionSchema = z.object({
  amplitudes: z.array(z.number().int()),
  probs: z.array(z.number()),
});

const buildInfoSchema = z.object({
  n: z.number().int(),
  l_max: z.number().int(),
  num_levels: z.number().int(),
  t00_bits: z.number().int(),
  max_payload_bits: z.number().int(),
  num_sequences: z.string().regex(/^[0-9]+$/),
});

const reportSchema = z.object({
  n: z.number().int(),
  l_max: z.number().int(),
  k_bits: z.number().int(),
  rate_bits: z.number(),
  log2_trellis_size: z.number(),
  avg_energy: z.number(),
  avg_weight: z.number(),
  amplitude_freqs: z.record(z.string(), z.number()),
  total_weight_bits: z.number().nullable(),
  divergence_bits: z.number().nullable(),
  rate_loss_bits: z.number().nullable(),
});

/** Code book statistics as reported by the analyze subcommand. */
export type CodebookReport = z.infer<typeof reportSchema>;

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "sphereshape-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function parseJson<S extends z.ZodTypeAny>(schema: S, raw: Buffer): z.infer<S> {
  return schema.parse(JSON.parse(raw.toString("utf8")));
}

function parseSequence(raw: Buffer): number[] {
  const text = raw.toString("utf8").trim();
  if (text === "") {
    return [];
  }
  return text.split(",").map((tok) => {
    const amp = Number(tok);
    if (!Number.isInteger(amp)) {
      throw new Error(`unexpected amplitude token ${JSON.stringify(tok)}`);
    }
    return amp;
  });
}

export interface QuantizeOptions {
  /** 2 (default), "e", or any float base for the self-information log. */
  logBase?: number | "e";
  /** Quantize absolute self-information and shift after rounding. */
  absolute?: boolean;
}

export function quantizeWeights(
  dist: TargetDistribution,
  f: number,
  options: QuantizeOptions = {},
): WeightedAlphabet {
  const stdout = withTempDir((dir) => {
    const distPath = join(dir, "dist.json");
    writeFileSync(distPath, JSON.stringify(dist));
    const args = ["quantize-weights", "--dist", distPath, "-f", String(f)];
    if (options.logBase !== undefined) {
      args.push("--log-base", String(options.logBase));
    }
    if (options.absolute) {
      args.push("--absolute");
    }
    return runCli(args);
  });
  return parseJson(alphabetSchema, stdout);
}

/**
 * Immutable view of a cached trellis. The cache file must stay in
 * place for the handle's lifetime; every query reads it afresh, so
 * handles are safe to share.
 */
export class TrellisHandle {
  constructor(
    readonly path: string,
    readonly n: number,
    readonly lMax: number,
    readonly numLevels: number,
    readonly t00Bits: number,
    readonly maxPayloadBits: number,
    readonly numSequences: bigint,
  ) {}
}

export interface BuildOptions {
  /** Pick the smallest radius holding 2^kBits sequences. */
  kBits?: number;
  /** Explicit weight budget instead. */
  lMax?: number;
  /** Where to put the cache; defaults to a fresh temp directory. */
  cachePath?: string;
}

export function buildTrellis(
  alphabet: WeightedAlphabet,
  n: number,
  options: BuildOptions,
): TrellisHandle {
  if ((options.kBits === undefined) === (options.lMax === undefined)) {
    throw new RangeError("exactly one of kBits or lMax is required");
  }
  const cachePath =
    options.cachePath ??
    join(mkdtempSync(join(tmpdir(), "sphereshape-")), "trellis.sst");
  const stdout = withTempDir((dir) => {
    const alphabetPath = join(dir, "alphabet.json");
    writeFileSync(alphabetPath, JSON.stringify(alphabet));
    const sizing =
      options.kBits !== undefined
        ? ["--k-bits", String(options.kBits)]
        : ["--l-max", String(options.lMax)];
    return runCli([
      "build-trellis",
      "--alphabet",
      alphabetPath,
      "--n",
      String(n),
      ...sizing,
      "--out",
      cachePath,
    ]);
  });
  const info = parseJson(buildInfoSchema, stdout);
  return new TrellisHandle(
    cachePath,
    info.n,
    info.l_max,
    info.num_levels,
    info.t00_bits,
    info.max_payload_bits,
    BigInt(info.num_sequences),
  );
}

/**
 * Map a k-bit payload (big-endian, exactly ceil(k / 8) bytes) to its
 * amplitude sequence.
 */
export function shape(
  handle: TrellisHandle,
  payload: Uint8Array,
  kBits: number = handle.maxPayloadBits,
): number[] {
  if (!Number.isInteger(kBits) || kBits < 0) {
    throw new RangeError("kBits must be a nonnegative integer");
  }
  const expected = payloadByteLength(kBits);
  if (payload.length !== expected) {
    throw new RangeError(
      `payload holds ${payload.length} bytes; a ${kBits}-bit payload takes exactly ${expected}`,
    );
  }
  const value = bytesToBigInt(payload);
  const stdout = runCli([
    "shape",
    "--trellis",
    handle.path,
    "--k-bits",
    String(kBits),
    "--payload-hex",
    value.toString(16),
  ]);
  return parseSequence(stdout);
}

/** Map a raw sequence index (any index below T_0^0) to its sequence. */
export function shapeIndex(handle: TrellisHandle, index: bigint): number[] {
  if (index < 0n) {
    throw new RangeError("index must be nonnegative");
  }
  const stdout = runCli([
    "shape",
    "--trellis",
    handle.path,
    "--raw",
    "--payload-hex",
    index.toString(16),
  ]);
  return parseSequence(stdout);
}

/** Invert shape: sequence back to the k-bit payload bytes. */
export function deshape(
  handle: TrellisHandle,
  sequence: readonly number[],
  kBits: number = handle.maxPayloadBits,
): Uint8Array {
  const stdout = runCli([
    "deshape",
    "--trellis",
    handle.path,
    "--k-bits",
    String(kBits),
    "--seq",
    sequence.join(","),
  ]);
  const hex = stdout.toString("utf8").trim();
  return bigIntToBytes(BigInt(`0x${hex}`), payloadByteLength(kBits));
}

/** Invert shapeIndex: sequence back to its rank. */
export function deshapeIndex(
  handle: TrellisHandle,
  sequence: readonly number[],
): bigint {
  const stdout = runCli([
    "deshape",
    "--trellis",
    handle.path,
    "--raw",
    "--seq",
    sequence.join(","),
  ]);
  return BigInt(`0x${stdout.toString("utf8").trim()}`);
}

export interface AnalyzeOptions {
  /** Code book size 2^kBits; defaults to the largest payload. */
  kBits?: number;
  /** Target distribution; enables divergence and rate loss. */
  dist?: TargetDistribution;
}

export function analyzeCodebook(
  handle: TrellisHandle,
  options: AnalyzeOptions = {},
): CodebookReport {
  const stdout = withTempDir((dir) => {
    const args = ["analyze", "--trellis", handle.path];
    if (options.kBits !== undefined) {
      args.push("--k-bits", String(options.kBits));
    }
    if (options.dist !== undefined) {
      const distPath = join(dir, "dist.json");
      writeFileSync(distPath, JSON.stringify(options.dist));
      args.push("--dist", distPath);
    }
    return runCli(args);
  });
  return parseJson(reportSchema, stdout);
}

export interface OptimizeOptions {
  /** ASK order, default 8. */
  m?: number;
  /** Output quantization bins, default 2048. */
  bins?: number;
  tol?: number;
  maxIter?: number;
}

/**
 * Capacity-achieving amplitude distribution for the peak-power
 * constrained AWGN channel at the given peak SNR.
 */
export function optimizeDistribution(
  psnrDb: number,
  options: OptimizeOptions = {},
): TargetDistribution {
  const stdout = runCli([
    "optimize-distribution",
    "--psnr-db",
    String(psnrDb),
    ...(options.m !== undefined ? ["--m", String(options.m)] : []),
    ...(options.bins !== undefined ? ["--bins", String(options.bins)] : []),
    ...(options.tol !== undefined ? ["--tol", String(options.tol)] : []),
    ...(options.maxIter !== undefined
      ? ["--max-iter", String(options.maxIter)]
      : []),
  ]);
  return parseJson(distributionSchema, stdout);
}
