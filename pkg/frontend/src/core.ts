import { spawnSync } from "node:child_process";

/** Error categories mirroring the CLI exit codes 2 through 5. */
export type ErrorCategory =
  | "usage"
  | "invalid-input"
  | "infeasible-rate"
  | "no-convergence";

const CATEGORY_BY_CODE: Record<number, ErrorCategory> = {
  2: "usage",
  3: "invalid-input",
  4: "infeasible-rate",
  5: "no-convergence",
};

export class SphereshapeError extends Error {
  readonly category: ErrorCategory;
  readonly exitCode: number;

  constructor(category: ErrorCategory, exitCode: number, message: string) {
    super(message);
    this.name = "SphereshapeError";
    this.category = category;
    this.exitCode = exitCode;
  }
}

/** Executable to invoke; SPHERESHAPE_BIN overrides the PATH lookup. */
export function cliBinary(): string {
  return process.env.SPHERESHAPE_BIN ?? "sphereshape";
}

/**
 * Run one CLI invocation and return its stdout bytes.
 *
 * Nonzero exits become SphereshapeError carrying the CLI's error
 * category and its stderr line; the bindings add no semantics of
 * their own.
 */
export function runCli(args: readonly string[]): Buffer {
  const result = spawnSync(cliBinary(), args, { maxBuffer: 64 * 1024 * 1024 });
  if (result.error) {
    throw result.error;
  }
  const status = result.status ?? -1;
  if (status !== 0) {
    const message =
      result.stderr.toString("utf8").trim() || `exit code ${status}`;
    const category = CATEGORY_BY_CODE[status];
    if (category === undefined) {
      throw new Error(`${cliBinary()} failed: ${message}`);
    }
    throw new SphereshapeError(category, status, message);
  }
  return result.stdout;
}

/** Bytes a k-bit payload occupies: ceil(k / 8). */
export function payloadByteLength(kBits: number): number {
  return (kBits + 7) >> 3;
}

export function bytesToBigInt(bytes: Uint8Array): bigint {
  let value = 0n;
  for (const b of bytes) {
    value = (value << 8n) | BigInt(b);
  }
  return value;
}

export function bigIntToBytes(value: bigint, byteLength: number): Uint8Array {
  if (value < 0n) {
    throw new RangeError("value must be nonnegative");
  }
  const out = new Uint8Array(byteLength);
  let rest = value;
  for (let i = byteLength - 1; i >= 0; i--) {
    out[i] = Number(rest & 0xffn);
    rest >>= 8n;
  }
  if (rest !== 0n) {
    throw new RangeError(`value does not fit in ${byteLength} bytes`);
  }
  return out;
}

/** Lowercase hex padded to ceil(k / 4) digits, matching deshape output. */
export function paddedHex(value: bigint, kBits: number): string {
  const digits = Math.max(1, (kBits + 3) >> 2);
  return value.toString(16).padStart(digits, "0");
}
