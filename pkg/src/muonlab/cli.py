"""Command-line entry point.

Subcommands:
  run           run a named preset into an output directory
  sweep-sigma   1-D noisy-sign hitting-time sweep (reference parameters)
  linesearch    greedy-vs-GD exact line-search comparison
  single        one (kind, method, lr, seed) trajectory, for debugging
  list-presets  show the preset registry

Exit codes: 0 success, 1 runtime error, 2 usage error. Thread count comes
from --threads, else the MUONLAB_THREADS environment variable, else the
machine's CPU count.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import csvio, presets
from .harness import GridJob, run_grid
from .problems import SPECTRUM_KINDS


def _default_threads() -> int:
    env = os.environ.get("MUONLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _check_out_dir(path: str, force: bool, parser: argparse.ArgumentParser):
    if os.path.isdir(path) and os.listdir(path) and not force:
        parser.error(f"--out directory {path!r} is not empty (use --force to overwrite)")
    os.makedirs(path, exist_ok=True)


def _parse_lr_grid(text: str, parser) -> tuple:
    try:
        grid = tuple(float(x) for x in text.split(","))
    except ValueError:
        parser.error(f"--lr-grid: could not parse {text!r} as comma-separated floats")
    if not grid or any(lr <= 0 for lr in grid):
        parser.error("--lr-grid must contain positive floats")
    return grid


def _parse_kinds(text: str, parser) -> tuple:
    kinds = tuple(k.strip() for k in text.split(",") if k.strip())
    for k in kinds:
        if k not in SPECTRUM_KINDS:
            parser.error(f"--kinds: unknown spectrum kind {k!r}")
    return kinds


def _progress_printer(enabled: bool):
    if not enabled:
        return None

    def show(done, total):
        if done == total or done % max(1, total // 20) == 0:
            print(f"\r{done}/{total} cells", end="", file=sys.stderr, flush=True)
            if done == total:
                print(file=sys.stderr)
    return show


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="muonlab",
        description="Matrix-orthogonalized optimizer experiments on quadratics.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a named preset")
    run_p.add_argument("--preset", required=True)
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--seeds", type=int, default=None,
                       help="number of initializations (preset default if omitted)")
    run_p.add_argument("--T", type=int, default=None)
    run_p.add_argument("--lr-grid", default=None)
    run_p.add_argument("--kinds", default=None)
    run_p.add_argument("--schedule", choices=("constant", "cosine"), default=None)
    run_p.add_argument("--threads", type=int, default=None)
    run_p.add_argument("--milestone-mode", choices=("horizon", "per-t"),
                       default="per-t")
    run_p.add_argument("--force", action="store_true")
    run_p.add_argument("--quiet", action="store_true")

    sweep_p = sub.add_parser("sweep-sigma", help="1-D noisy-sign hitting sweep")
    sweep_p.add_argument("--out", required=True)
    sweep_p.add_argument("--seed", type=int, default=0)
    sweep_p.add_argument("--samples", type=int, default=10_000)
    sweep_p.add_argument("--force", action="store_true")

    ls_p = sub.add_parser("linesearch", help="greedy vs GD line-search comparison")
    ls_p.add_argument("--out", required=True)
    ls_p.add_argument("--seed", type=int, default=0)
    ls_p.add_argument("--seeds", type=int, default=100)
    ls_p.add_argument("--T", type=int, default=100)
    ls_p.add_argument("--force", action="store_true")

    single_p = sub.add_parser("single", help="one trajectory, printed summary")
    single_p.add_argument("--kind", required=True)
    single_p.add_argument("--method", required=True,
                          choices=("gd", "adam", "muon_exact", "muon_ns"))
    single_p.add_argument("--lr", type=float, default=0.1)
    single_p.add_argument("--T", type=int, default=500)
    single_p.add_argument("--seed", type=int, default=0)
    single_p.add_argument("--out", default=None)
    single_p.add_argument("--force", action="store_true")

    sub.add_parser("list-presets", help="show the preset registry")
    return parser


def _cmd_run(args, parser) -> int:
    if args.preset not in presets.PRESETS:
        print(f"error: unknown preset {args.preset!r}; "
              f"see `muonlab list-presets`", file=sys.stderr)
        return 2
    _check_out_dir(args.out, args.force, parser)
    kwargs = {"threads": args.threads if args.threads else _default_threads(),
              "progress": _progress_printer(not args.quiet)}
    if args.seeds is not None:
        kwargs["seeds"] = args.seeds
    if args.T is not None:
        kwargs["T"] = args.T
    if args.lr_grid is not None:
        kwargs["lr_grid"] = _parse_lr_grid(args.lr_grid, parser)
    if args.kinds is not None:
        kwargs["kinds"] = _parse_kinds(args.kinds, parser)
    if args.schedule is not None:
        kwargs["schedule"] = args.schedule
    if args.preset in ("table1_exact_vs_gd", "table2_ns_vs_exact", "appD_vanishing_lr"):
        kwargs["milestone_mode"] = args.milestone_mode
    if args.preset in ("fig4_median_hitting", "appF_sigma_sweep", "fig5_greedy"):
        for k in ("lr_grid", "kinds", "schedule"):
            kwargs.pop(k, None)
    info = presets.run_preset(args.preset, args.out, base_seed=args.seed, **kwargs)
    print(f"{args.preset}: {info['runs']} runs, {info['rows']} rows "
          f"-> {args.out} ({info['runtime_seconds']:.1f}s)")
    return 0


def _cmd_sweep(args, parser) -> int:
    _check_out_dir(args.out, args.force, parser)
    info = presets.run_fig4(args.out, base_seed=args.seed, seeds=args.samples)
    print(f"sweep-sigma: {info['rows']} noise levels -> {args.out} "
          f"({info['runtime_seconds']:.1f}s)")
    return 0


def _cmd_linesearch(args, parser) -> int:
    _check_out_dir(args.out, args.force, parser)
    info = presets.run_fig5(args.out, base_seed=args.seed, seeds=args.seeds, T=args.T)
    print(f"linesearch: {info['runs']} runs -> {args.out} "
          f"({info['runtime_seconds']:.1f}s)")
    return 0


def _cmd_single(args, parser) -> int:
    from .optimizers import OptimizerSpec, Schedule
    method, projection = {
        "gd": ("gd", "exact"), "adam": ("adam", "exact"),
        "muon_exact": ("muon", "exact"), "muon_ns": ("muon", "polar_express"),
    }[args.method]
    spec = OptimizerSpec(method=method, projection=projection,
                         schedule=Schedule(kind="constant", lr0=args.lr,
                                           horizon=args.T, lr_steps=args.T))
    job = GridJob(base_seed=args.seed, n=100, T=args.T, lr_grid=(args.lr,),
                  kinds=(args.kind,), specs=(spec,))
    results = run_grid(job, 1, threads=1)
    entry = results[(args.kind, spec.label, args.lr, 0)]
    losses = entry["losses"]
    print(f"kind={args.kind} method={spec.label} lr={args.lr} T={args.T} "
          f"seed={args.seed}")
    print(f"initial loss: {losses[0]:.6e}")
    print(f"final loss:   {losses[-1]:.6e}")
    print(f"best loss:    {losses.min():.6e}")
    if entry["diverged"]:
        print("run diverged (loss exceeded cap)")
    if args.out:
        _check_out_dir(args.out, args.force, parser)
        rows = [[args.kind, spec.label, args.lr, args.seed, t, float(losses[t])]
                for t in range(len(losses))]
        csvio.write_csv(os.path.join(args.out, "runs.csv"),
                        ["kind", "method", "lr", "seed", "step", "loss"], rows)
        print(f"wrote {args.out}/runs.csv")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, parser)
        if args.command == "sweep-sigma":
            return _cmd_sweep(args, parser)
        if args.command == "linesearch":
            return _cmd_linesearch(args, parser)
        if args.command == "single":
            return _cmd_single(args, parser)
        if args.command == "list-presets":
            print(presets.list_presets())
            return 0
    except SystemExit:
        raise
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 1
    except Exception as exc:  # surfaced with exit code 1 per contract
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
