"""Command line entry point.

    twostage-ldpc simulate --code gen:504,3,6 --snr 2.5,3.0 --decoders standard,twostage \\
        --trials 20000 --out results.csv

Exit status: 0 on success, 1 on configuration errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

from .bp import DecoderConfig
from .code_model import AlistError, CodeConstructionError, make_regular_code, parse_code_source, save_alist
from .sim import SimConfig, format_csv, format_failures, format_summary, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _name_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _u64(text: str) -> int:
    val = int(text)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def build_parser() -> argparse.ArgumentParser:
    defaults = DecoderConfig()
    parser = _Parser(prog="twostage-ldpc", description="LDPC decoding simulations over BPSK/AWGN.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress per point")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="Monte Carlo BER/BLER sweep (all-zero codeword)")
    sim.add_argument("--code", required=True,
                     help="alist path, or gen:N,dv,dc[,seed] for a random regular girth-6 code")
    sim.add_argument("--snr", type=_float_list, default=[1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
                     help="comma-separated Eb/N0 points in dB")
    sim.add_argument("--decoders", type=_name_list, default=["standard", "avg", "sel", "twostage"],
                     help="subset of standard,avg,sel,twostage")
    sim.add_argument("--trials", type=int, default=10_000, help="maximum trials per point")
    sim.add_argument("--min-trials", type=int, default=0,
                     help="do not stop a point early before this many trials")
    sim.add_argument("--min-block-errors", type=int, default=100,
                     help="stop a point once this many block errors are seen (0 disables)")
    sim.add_argument("--max-iters", type=int, default=defaults.max_iters)
    sim.add_argument("--redecode-iters", type=int, default=None,
                     help="second-stage iteration budget (default: --max-iters)")
    sim.add_argument("--beta", type=float, default=defaults.beta, help="belief-drop selection threshold")
    sim.add_argument("--nu", type=float, default=defaults.nu, help="belief-rise selection threshold")
    sim.add_argument("--eta", type=float, default=defaults.eta, help="second-stage LLR flip scale")
    sim.add_argument("--cn-threshold", type=int, default=defaults.cn_threshold,
                     help="run stage 2 only below this many unsatisfied checks")
    sim.add_argument("--llr-clip", type=float, default=defaults.llr_clip)
    sim.add_argument("--seed", type=_u64, default=0)
    sim.add_argument("--batch-size", type=int, default=500, help="frames decoded per vectorized batch")
    sim.add_argument("--out", help="CSV output path (default: CSV on stdout)")
    sim.add_argument("--dump-failures", metavar="PATH", help="write one record per block error")

    gen = sub.add_parser("make-code", help="write a random regular code as alist")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--dv", type=int, default=3)
    gen.add_argument("--dc", type=int, default=6)
    gen.add_argument("--girth", type=int, choices=(4, 6), default=6)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    return parser


def _simulate(args) -> int:
    try:
        dcfg = DecoderConfig(max_iters=args.max_iters, llr_clip=args.llr_clip, beta=args.beta,
                             nu=args.nu, eta=args.eta, cn_threshold=args.cn_threshold,
                             redecode_iters=args.redecode_iters)
        cfg = SimConfig(snr_points=args.snr, decoders=args.decoders, trials=args.trials,
                        min_block_errors=args.min_block_errors, min_trials=args.min_trials,
                        seed=args.seed, decoder=dcfg, batch_size=args.batch_size)
        g = parse_code_source(args.code)
    except (ValueError, AlistError, CodeConstructionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read code: {exc}", file=sys.stderr)
        return EXIT_IO

    with contextlib.ExitStack() as stack:
        # open outputs up front so an unwritable path fails before a long sweep
        try:
            out_fh, fail_fh = (stack.enter_context(open(p, "w", newline="")) if p else None
                               for p in (args.out, args.dump_failures))
            rows = run_sweep(g, cfg)
            text = format_csv(rows)
            if out_fh:
                out_fh.write(text)
            if fail_fh:
                fail_fh.write(format_failures(rows))
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return EXIT_IO

    header = (f"# code N={g.n_vars} M={g.n_checks} rate={1 - g.n_checks / g.n_vars:.4g}; "
              f"SNR axis is Eb/N0 (dB); all-zero codeword; seed={cfg.seed}")
    if args.out:
        print(header)
        print(format_summary(rows))
    else:
        sys.stdout.write(text)
        print(header, file=sys.stderr)
        print(format_summary(rows), file=sys.stderr)
    return EXIT_OK


def _make_code(args) -> int:
    try:
        g = make_regular_code(args.n, args.dv, args.dc, seed=args.seed, girth_min=args.girth)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with open(args.out, "w") as fh:
            fh.write(save_alist(g))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    if args.command == "simulate":
        return _simulate(args)
    return _make_code(args)


if __name__ == "__main__":
    sys.exit(main())
