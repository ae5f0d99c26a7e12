"""Command line interface.

Subcommands cover the full pipeline: quantize a target distribution
into weights, build and cache a trellis, shape payloads and deshape
sequences, run the constant-composition matcher, report codebook
statistics, sweep the quantization scale, and optimize a
peak-power-constrained input distribution.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 infeasible
rate, 5 solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from . import ccdm
from .alphabet import TargetDistribution, WeightedAlphabet, quantize_weights
from .analysis import summarize_codebook
from .channel_capacity import optimize_ppc_distribution
from .codec import deshape, shape
from .distributions import entropy
from .trellis import InfeasibleRateError, Trellis, build_trellis, select_l_max

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INFEASIBLE = 4
EXIT_NO_CONVERGENCE = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise CliError(EXIT_INPUT, f"{path}: invalid JSON: {e}") from e


def _load_dist(path: str) -> TargetDistribution:
    obj = _read_json(path)
    try:
        return TargetDistribution.from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(EXIT_INPUT, f"{path}: bad distribution: {e}") from e


def _load_alphabet(path: str) -> WeightedAlphabet:
    obj = _read_json(path)
    try:
        return WeightedAlphabet.from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(EXIT_INPUT, f"{path}: bad alphabet: {e}") from e


def _load_trellis(path: str) -> Trellis:
    try:
        return Trellis.load(path)
    except (OSError, ValueError) as e:
        raise CliError(EXIT_INPUT, f"cannot load trellis {path}: {e}") from e


def _write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_log_base(text: str) -> float:
    if text == "e":
        return math.e
    try:
        return float(text)
    except ValueError:
        raise CliError(EXIT_USAGE, f"bad log base {text!r}") from None


def _payload_index(args, k_bits: int | None) -> int:
    """Payload value from the flags; k_bits None skips the framing checks."""
    if args.payload_hex is None and args.payload_file is None:
        raise CliError(EXIT_USAGE, "--payload-hex or --payload-file is required")
    if args.payload_hex is not None:
        try:
            value = int(args.payload_hex, 16)
        except ValueError:
            raise CliError(EXIT_INPUT, "payload is not valid hex") from None
    else:
        try:
            with open(args.payload_file, "rb") as fh:
                data = fh.read()
        except OSError as e:
            raise CliError(EXIT_INPUT, f"cannot read payload: {e}") from e
        if k_bits is not None and len(data) != (k_bits + 7) // 8:
            raise CliError(
                EXIT_INPUT,
                f"payload file holds {len(data)} bytes; a {k_bits}-bit payload "
                f"takes exactly {(k_bits + 7) // 8}",
            )
        value = int.from_bytes(data, "big")
    if k_bits is not None and value >> k_bits:
        raise CliError(EXIT_INPUT, f"payload does not fit in {k_bits} bits")
    return value


def _index_to_hex(index: int, k_bits: int) -> str:
    digits = max(1, (k_bits + 3) // 4)
    return format(index, f"0{digits}x")


def _parse_sequence(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise CliError(EXIT_INPUT, "sequence must be a list of integers") from None


def _sequence_arg(args) -> tuple[int, ...]:
    if args.seq is None and args.seq_file is None:
        raise CliError(EXIT_USAGE, "--seq or --seq-file is required")
    if args.seq is not None:
        return _parse_sequence(args.seq)
    try:
        with open(args.seq_file) as fh:
            return _parse_sequence(fh.read())
    except OSError as e:
        raise CliError(EXIT_INPUT, f"cannot read sequence: {e}") from e


def _effective_k_bits(args, limit: int) -> int:
    k = args.k_bits if args.k_bits is not None else limit
    if k < 0:
        raise CliError(EXIT_USAGE, "k-bits must be nonnegative")
    if k > limit:
        raise CliError(
            EXIT_INFEASIBLE,
            f"{k}-bit payloads need 2^{k} sequences; only 2^{limit} available",
        )
    return k


def cmd_quantize_weights(args) -> int:
    dist = _load_dist(args.dist)
    alphabet = quantize_weights(
        dist,
        args.factor,
        log_base=_parse_log_base(args.log_base),
        relative=not args.absolute,
    )
    _write_text(args.out, alphabet.to_json() + "\n")
    return EXIT_OK


def cmd_build_trellis(args) -> int:
    alphabet = _load_alphabet(args.alphabet)
    if args.k_bits is not None:
        l_max, trellis = select_l_max(alphabet, args.n, args.k_bits)
    else:
        trellis = build_trellis(alphabet, args.n, args.l_max)
        l_max = args.l_max
    trellis.save(args.out)
    info = {
        "n": trellis.n,
        "l_max": l_max,
        "num_levels": len(trellis.level_set),
        "t00_bits": trellis.num_sequences.bit_length(),
        "max_payload_bits": trellis.max_payload_bits,
        "num_sequences": str(trellis.num_sequences),
    }
    print(json.dumps(info))
    return EXIT_OK


def cmd_shape(args) -> int:
    trellis = _load_trellis(args.trellis)
    if args.raw:
        index = _payload_index(args, None)
        if index >= trellis.num_sequences:
            raise CliError(
                EXIT_INPUT,
                f"index {index} out of range; trellis holds "
                f"{trellis.num_sequences} sequences",
            )
    else:
        k_bits = _effective_k_bits(args, trellis.max_payload_bits)
        index = _payload_index(args, k_bits)
    sequence = shape(trellis, index)
    _write_text(args.out, ",".join(map(str, sequence)) + "\n")
    return EXIT_OK


def cmd_deshape(args) -> int:
    trellis = _load_trellis(args.trellis)
    sequence = _sequence_arg(args)
    try:
        index = deshape(trellis, sequence)
    except ValueError as e:
        raise CliError(EXIT_INPUT, str(e)) from e
    if args.raw:
        _write_text(args.out, format(index, "x") + "\n")
        return EXIT_OK
    k_bits = _effective_k_bits(args, trellis.max_payload_bits)
    if index >> k_bits:
        raise CliError(
            EXIT_INPUT, f"sequence rank {index} exceeds the {k_bits}-bit payload"
        )
    _write_text(args.out, _index_to_hex(index, k_bits) + "\n")
    return EXIT_OK


def cmd_ccdm(args) -> int:
    dist = _load_dist(args.dist)
    composition = ccdm.composition_from_distribution(dist, args.n)
    limit = ccdm.max_payload_bits(composition)
    if args.action == "info":
        info = {
            "composition": list(composition),
            "n": args.n,
            "num_sequences": str(ccdm.multinomial(composition)),
            "max_payload_bits": limit,
            "rate_bits_per_amplitude": limit / args.n,
        }
        print(json.dumps(info))
        return EXIT_OK
    k_bits = _effective_k_bits(args, limit)
    if args.action == "encode":
        index = _payload_index(args, k_bits)
        sequence = ccdm.encode(dist.amplitudes, composition, index)
        _write_text(args.out, ",".join(map(str, sequence)) + "\n")
        return EXIT_OK
    sequence = _sequence_arg(args)
    try:
        index = ccdm.decode(dist.amplitudes, composition, sequence)
    except ValueError as e:
        raise CliError(EXIT_INPUT, str(e)) from e
    if index >> k_bits:
        raise CliError(
            EXIT_INPUT, f"sequence rank {index} exceeds the {k_bits}-bit payload"
        )
    _write_text(args.out, _index_to_hex(index, k_bits) + "\n")
    return EXIT_OK


def cmd_analyze(args) -> int:
    trellis = _load_trellis(args.trellis)
    dist = _load_dist(args.dist) if args.dist else None
    k_bits = _effective_k_bits(args, trellis.max_payload_bits)
    report = summarize_codebook(trellis, k_bits, dist)
    obj = {
        "n": report.n,
        "l_max": report.l_max,
        "k_bits": report.k_bits,
        "rate_bits": report.rate_bits,
        "log2_trellis_size": report.log2_trellis_size,
        "avg_energy": report.avg_energy,
        "avg_weight": report.avg_weight,
        "amplitude_freqs": {str(a): p for a, p in report.amplitude_freqs.items()},
        "total_weight_bits": report.total_weight_bits,
        "divergence_bits": report.divergence_bits,
        "rate_loss_bits": report.rate_loss_bits,
    }
    _write_text(args.out, json.dumps(obj, indent=2) + "\n")
    return EXIT_OK


def _sweep_point(work) -> tuple:
    """One distinct weight vector of the sweep; module-level so it pickles."""
    amps, weights, n, k_bits, probs_by_amp = work
    alphabet = WeightedAlphabet(amps, weights)
    _, trellis = select_l_max(alphabet, n, k_bits)
    dist = TargetDistribution(*zip(*sorted(probs_by_amp.items())))
    report = summarize_codebook(trellis, trellis.max_payload_bits, dist)
    return (
        trellis.l_max,
        trellis.num_sequences.bit_length(),
        report.avg_energy,
        report.divergence_bits,
    )


def cmd_sweep_f(args) -> int:
    dist = _load_dist(args.dist)
    log_base = _parse_log_base(args.log_base)
    h = entropy(dist.probs)
    steps = int(round((args.f_stop - args.f_start) / args.f_step))
    if steps < 0:
        raise CliError(EXIT_USAGE, "empty f grid")
    grid = [round(args.f_start + i * args.f_step, 12) for i in range(steps + 1)]
    probs_by_amp = dict(zip(dist.amplitudes, dist.probs))
    # the same weight vector recurs across f; evaluate each one once
    jobs: dict[tuple, list[float]] = {}
    for f in grid:
        alphabet = quantize_weights(
            dist, f, log_base=log_base, relative=not args.absolute
        )
        key = (alphabet.amplitudes, alphabet.weights)
        jobs.setdefault(key, []).append(f)
    work = [
        (amps, weights, args.n, args.k_bits, probs_by_amp)
        for amps, weights in jobs.keys()
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            evaluated = list(pool.map(_sweep_point, work))
    else:
        evaluated = [_sweep_point(w) for w in work]
    rows = []
    for (key, fs), point in zip(jobs.items(), evaluated):
        l_max, t00_bits, avg_energy, div = point
        rate_loss = h - (t00_bits - 1) / args.n
        for f in fs:
            rows.append((f, l_max, t00_bits, avg_energy, rate_loss, div))
    rows.sort(key=lambda r: r[0])
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(["f", "l_max", "t00_bits", "avg_energy", "rate_loss", "divergence"])
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_optimize_distribution(args) -> int:
    if args.psnr_sweep:
        try:
            grid = [float(tok) for tok in args.psnr_sweep.split(",")]
        except ValueError:
            raise CliError(EXIT_USAGE, "psnr-sweep must be comma-separated numbers") from None
        out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
        try:
            writer = csv.writer(out)
            writer.writerow(["psnr_db", "capacity_bits", "kkt_residual", "iterations"])
            for psnr in grid:
                res = optimize_ppc_distribution(
                    psnr, m=args.m, bins=args.bins, tol=args.tol, max_iter=args.max_iter
                )
                if not res.converged:
                    raise CliError(
                        EXIT_NO_CONVERGENCE,
                        f"no convergence at {psnr} dB within {args.max_iter} iterations",
                    )
                writer.writerow([repr(psnr), repr(res.capacity_bits),
                                 repr(res.kkt_residual), res.iterations])
        finally:
            if out is not sys.stdout:
                out.close()
        return EXIT_OK
    if args.psnr_db is None:
        raise CliError(EXIT_USAGE, "either --psnr-db or --psnr-sweep is required")
    res = optimize_ppc_distribution(
        args.psnr_db, m=args.m, bins=args.bins, tol=args.tol, max_iter=args.max_iter
    )
    if not res.converged:
        raise CliError(
            EXIT_NO_CONVERGENCE,
            f"no convergence within {args.max_iter} iterations "
            f"(residual {res.kkt_residual:.3e})",
        )
    _write_text(args.out, res.amplitude_dist.to_json() + "\n")
    print(
        f"capacity {res.capacity_bits:.6f} bits/symbol at {args.psnr_db} dB, "
        f"kkt residual {res.kkt_residual:.2e}, {res.iterations} iterations",
        file=sys.stderr,
    )
    return EXIT_OK


def _add_payload_args(sub) -> None:
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--payload-hex", help="payload as a hex string")
    src.add_argument("--payload-file", help="payload as big-endian raw bytes")


def _add_sequence_args(sub) -> None:
    src = sub.add_mutually_exclusive_group(required=True)
    src.add_argument("--seq", help="comma or space separated amplitudes")
    src.add_argument("--seq-file", help="text file of amplitudes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphereshape",
        description="Sphere shaping for arbitrary discrete channel-input distributions",
    )
    cmds = parser.add_subparsers(dest="command", required=True)

    p = cmds.add_parser("quantize-weights", help="distribution to integer weights")
    p.add_argument("--dist", required=True, help="target distribution JSON")
    p.add_argument("--factor", "-f", type=float, required=True,
                   help="quantization scale f")
    p.add_argument("--log-base", default="2", help="2, e, or any float (default 2)")
    p.add_argument("--absolute", action="store_true",
                   help="quantize absolute self-information, shift after rounding")
    p.add_argument("--out", "-o", help="output path (default stdout)")
    p.set_defaults(func=cmd_quantize_weights)

    p = cmds.add_parser("build-trellis", help="build and cache a trellis")
    p.add_argument("--alphabet", required=True, help="weighted alphabet JSON")
    p.add_argument("--n", type=int, required=True, help="sequence length")
    sizing = p.add_mutually_exclusive_group(required=True)
    sizing.add_argument("--k-bits", type=int, help="pick smallest l_max for 2^k sequences")
    sizing.add_argument("--l-max", type=int, help="explicit weight budget")
    p.add_argument("--out", required=True, help="trellis cache path")
    p.set_defaults(func=cmd_build_trellis)

    p = cmds.add_parser("shape", help="payload to amplitude sequence")
    p.add_argument("--trellis", required=True, help="trellis cache path")
    framing = p.add_mutually_exclusive_group()
    framing.add_argument("--k-bits", type=int, help="payload size (default: largest)")
    framing.add_argument("--raw", action="store_true",
                         help="address by index over all sequences, no framing")
    _add_payload_args(p)
    p.add_argument("--out", "-o", help="output path (default stdout)")
    p.set_defaults(func=cmd_shape)

    p = cmds.add_parser("deshape", help="amplitude sequence to payload hex")
    p.add_argument("--trellis", required=True, help="trellis cache path")
    framing = p.add_mutually_exclusive_group()
    framing.add_argument("--k-bits", type=int, help="payload size (default: largest)")
    framing.add_argument("--raw", action="store_true",
                         help="emit the sequence rank as minimal hex, no framing")
    _add_sequence_args(p)
    p.add_argument("--out", "-o", help="output path (default stdout)")
    p.set_defaults(func=cmd_deshape)

    p = cmds.add_parser("ccdm", help="constant-composition matcher")
    p.add_argument("action", choices=["info", "encode", "decode"])
    p.add_argument("--dist", required=True, help="target distribution JSON")
    p.add_argument("--n", type=int, required=True, help="sequence length")
    p.add_argument("--k-bits", type=int, help="payload size (default: largest)")
    p.add_argument("--payload-hex")
    p.add_argument("--payload-file")
    p.add_argument("--seq")
    p.add_argument("--seq-file")
    p.add_argument("--out", "-o", help="output path (default stdout)")
    p.set_defaults(func=cmd_ccdm)

    p = cmds.add_parser("analyze", help="codebook statistics report")
    p.add_argument("--trellis", required=True, help="trellis cache path")
    p.add_argument("--k-bits", type=int, help="codebook size 2^k (default: largest)")
    p.add_argument("--dist", help="target distribution JSON, enables divergence")
    p.add_argument("--out", "-o", help="output path (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = cmds.add_parser("sweep-f", help="CSV sweep over the quantization scale")
    p.add_argument("--dist", required=True, help="target distribution JSON")
    p.add_argument("--n", type=int, default=224, help="sequence length (default 224)")
    p.add_argument("--k-bits", type=int, default=336,
                   help="payload bits for radius selection (default 336)")
    p.add_argument("--f-start", type=float, default=0.1)
    p.add_argument("--f-stop", type=float, default=6.1)
    p.add_argument("--f-step", type=float, default=0.1)
    p.add_argument("--log-base", default="2")
    p.add_argument("--absolute", action="store_true")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--out", "-o", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep_f)

    p = cmds.add_parser("optimize-distribution",
                        help="capacity-achieving peak-power-constrained input")
    p.add_argument("--psnr-db", type=float, help="peak SNR in dB")
    p.add_argument("--psnr-sweep", help="comma-separated peak SNRs; emits CSV")
    p.add_argument("--m", type=int, default=8, help="ASK order (default 8)")
    p.add_argument("--bins", type=int, default=2048, help="output bins (default 2048)")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--out", "-o", help="output path (default stdout)")
    p.set_defaults(func=cmd_optimize_distribution)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except InfeasibleRateError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
