# Copyright 2025 Phi-Long Le. All rights reserved.
# Use of this source code is governed by a MIT license that can be
# found in the LICENSE file.

import argparse
import contextlib
import logging
import sys
from pathlib import Path
from typing import List, Optional

from scipy import fft

from whitham.command_analyze import command_analyze
from whitham.command_bifurcate import command_bifurcate
from whitham.command_branch import command_branch
from whitham.command_kernel import command_kernel
from whitham.command_pkernel import command_pkernel
from whitham.errors import ExitCode, exit_code_for


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Whitham kernels, bifurcation and steady periodic waves."
    )
    parser.add_argument(
        "--quiet",
        action="store_true",
        help="Only log errors",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Number of FFT workers",
    )
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path("."),
        help="Directory for output files and the run manifest",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Recorded in the run manifest",
    )

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # main.py kernel
    kernel = subparsers.add_parser("kernel", help="Tabulate the Whitham kernel K")
    kernel.add_argument("--from", dest="x_from", type=float, default=0.1)
    kernel.add_argument("--to", dest="x_to", type=float, default=5.0)
    kernel.add_argument("--step", type=float, default=0.1)
    kernel.add_argument(
        "--method",
        choices=("auto", "series", "split", "asymptotic"),
        default="auto",
    )
    kernel.add_argument("--tol", type=float, default=1e-12)
    kernel.add_argument(
        "--cross-validate",
        action="store_true",
        help="Compare the series and split evaluations on [0.1, 5]",
    )
    kernel.add_argument("--out", type=Path, default=Path("kernel.csv"))

    # main.py pkernel
    pkernel = subparsers.add_parser(
        "pkernel", help="Tabulate the periodized kernel K_P on (0, P/2]"
    )
    pkernel.add_argument("--period", type=float, required=True)
    pkernel.add_argument("--points", type=int, default=64)
    pkernel.add_argument("--method", choices=("direct", "cosh"), default="direct")
    pkernel.add_argument(
        "--three-method",
        action="store_true",
        help="Check direct sum, cosh formula and Fourier modes against each other",
    )
    pkernel.add_argument("--out", type=Path, default=Path("pkernel.csv"))

    # main.py bifurcate
    bifurcate = subparsers.add_parser(
        "bifurcate", help="Local expansion of the primary bifurcation"
    )
    wavenumber = bifurcate.add_mutually_exclusive_group(required=True)
    wavenumber.add_argument("--period", type=float)
    wavenumber.add_argument("--xi", type=float)
    bifurcate.add_argument(
        "--find-critical",
        action="store_true",
        help="Locate the wavenumber where mu_2 changes sign",
    )
    bifurcate.add_argument("--out", type=Path, default=Path("expansion.json"))

    # main.py branch
    branch = subparsers.add_parser("branch", help="Trace the primary branch")
    branch.add_argument(
        "--config",
        type=Path,
        required=True,
        help="Path to the continuation config file",
    )

    # main.py analyze
    analyze = subparsers.add_parser(
        "analyze", help="Diagnostics and crest fit of a stored wave"
    )
    analyze.add_argument("--wave", type=Path, required=True)
    analyze.add_argument("--out", type=Path, default=Path("cusp.csv"))

    return parser


def _dispatch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    out_dir: Path = args.out_dir
    if args.command == "kernel":
        command_kernel(
            x_from=args.x_from,
            x_to=args.x_to,
            step=args.step,
            method=args.method,
            tol=args.tol,
            out_dir=out_dir,
            out_file=args.out,
            should_cross_validate=args.cross_validate,
            seed=args.seed,
        )
    elif args.command == "pkernel":
        command_pkernel(
            P=args.period,
            n_points=args.points,
            method=args.method,
            out_dir=out_dir,
            out_file=args.out,
            should_check=args.three_method,
            seed=args.seed,
        )
    elif args.command == "bifurcate":
        command_bifurcate(
            out_dir=out_dir,
            out_file=args.out,
            P=args.period,
            xi=args.xi,
            should_find_critical=args.find_critical,
            seed=args.seed,
        )
    elif args.command == "branch":
        command_branch(config_file=args.config, out_dir=out_dir, seed=args.seed)
    elif args.command == "analyze":
        command_analyze(
            wave_file=args.wave, out_dir=out_dir, out_file=args.out, seed=args.seed
        )
    else:
        parser.print_help()
        sys.exit(ExitCode.USAGE)


def main(argv: Optional[List[str]] = None) -> None:
    parser = _build_parser()
    args = parser.parse_args(argv)

    # Log in other modules will use this configuration
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s:%(filename)s:%(lineno)d:%(message)s",
    )

    if args.threads is not None and args.threads < 1:
        parser.error(f"--threads must be positive, got {args.threads}")
    workers = (
        fft.set_workers(args.threads)
        if args.threads is not None
        else contextlib.nullcontext()
    )

    try:
        with workers:
            _dispatch(args, parser)
    except Exception as e:
        code = exit_code_for(e)
        if code == ExitCode.UNEXPECTED:
            print(f"Unexpected error: {e}", file=sys.stderr)
        else:
            print(f"Error: {e}", file=sys.stderr)
        sys.exit(code)


if __name__ == "__main__":
    main()
