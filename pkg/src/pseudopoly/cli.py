"""Command-line interface: code generation, decoding, channel sweeps, and
polytope structure analysis.

Exit codes: 0 success (and integral decode), 2 usage or configuration
error, 3 non-integral decode outcome. Every run prints its resolved
configuration (defaults included) to standard error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .codes import (
    BudgetExceededError,
    enumerate_codewords,
    from_alist,
    random_regular,
    to_alist,
    verify_expansion,
)
from .decoders import (
    INTEGRAL,
    Exhaustive,
    Randomized,
    enumerate_vertices,
    facet_guess,
    format_outcome,
    lp_decode,
    read_llr,
)
from .harness import CodeSpec, ExperimentConfig, parse_decoder, run_sweep
from .polytope import (
    active_set,
    build_polytope,
    fractional_support,
    structure_constants,
)
from .simplex import SolverError


def _echo_config(name: str, args: argparse.Namespace) -> None:
    pairs = " ".join(f"{k}={v}" for k, v in sorted(vars(args).items()) if k != "func")
    print(f"pseudopoly {__version__} {name}: {pairs}", file=sys.stderr)


def _load_code(path: str):
    return from_alist(Path(path).read_text())


def _points_grid(spec: str) -> tuple[float, ...]:
    """Parse 'start:step:stop' (inclusive) or a comma list of values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError("grid must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        pts = []
        v = start
        while v <= stop + 1e-12:
            pts.append(round(v, 12))
            v += step
        return tuple(pts)
    return tuple(float(p) for p in spec.split(","))


def cmd_gen(args) -> int:
    H = random_regular(args.n, args.dv, args.dc, args.seed)
    Path(args.out).write_text(to_alist(H))
    print(f"wrote {args.out}: n={H.n} m={H.m}")
    return 0


def cmd_decode(args) -> int:
    H = _load_code(args.code)
    with open(args.llr) as fh:
        g = read_llr(fh)
    if g.size != H.n:
        raise ValueError(f"llr length {g.size} != n = {H.n}")
    P = build_polytope(H)
    mode = "exact" if args.exact else "float"
    if args.decoder == "lp":
        outcome = lp_decode(P, g, mode=mode)
    else:
        strategy = (
            Exhaustive()
            if args.decoder == "efg"
            else Randomized(args.guesses, args.seed)
        )
        outcome = facet_guess(P, g, strategy=strategy, mode=mode)
    sys.stdout.write(format_outcome(outcome))
    return 0 if outcome.status == INTEGRAL else 3


def cmd_sweep(args) -> int:
    if args.code:
        spec = CodeSpec.from_alist_text(Path(args.code).read_text(), label=Path(args.code).stem)
    else:
        n, dv, dc, seed = (int(v) for v in args.gen_spec.split(","))
        spec = CodeSpec.random(n, dv, dc, seed)
    config = ExperimentConfig(
        code=spec,
        channel_kind=args.channel,
        points=_points_grid(args.points),
        decoders=tuple(parse_decoder(tok) for tok in args.decoders.split(",")),
        trials=args.trials,
        master_seed=args.seed,
        max_word_errors=args.max_errors,
        workers=args.workers,
    )
    result = run_sweep(config)
    with open(args.out, "w") as fh:
        result.to_csv(fh)
    print(f"wrote {args.out}: {len(result.rows)} rows")
    return 0


def _analyze_active_sets(args, out) -> None:
    H = _load_code(args.code)
    P = build_polytope(H)
    deg = H.regular_degrees()
    words = enumerate_codewords(H)
    mode = "exact" if args.exact else "float"
    counts = []
    for k, w in enumerate(words):
        size = len(active_set(P, [int(v) for v in w], mode=mode))
        counts.append(size)
        out.write(f"codeword_{k}_active={size}\n")
    predicted = H.m * (deg[1] if deg else 0) + H.n
    out.write(f"predicted_active={predicted}\n")
    out.write(f"all_match={'true' if all(c == predicted for c in counts) else 'false'}\n")
    out.write(f"rate_from_rows={H.rate:.6g}\n")
    out.write(f"rate_from_rank={1.0 - H.rank() / H.n:.6g}\n")


def _analyze_expansion(args, out) -> None:
    H = _load_code(args.code)
    cert = verify_expansion(
        H,
        args.alpha,
        args.delta,
        mode=args.expansion_mode,
        trials=args.trials,
        seed=args.seed,
        budget=args.budget,
    )
    out.write(f"mode={cert.mode}\n")
    out.write(f"alpha={cert.alpha:.6g}\n")
    out.write(f"delta={cert.delta:.6g}\n")
    out.write(f"holds={'true' if cert.holds else 'false'}\n")
    out.write(f"subsets_checked={cert.subsets_checked}\n")
    if cert.witness is not None:
        out.write(f"witness={','.join(str(i) for i in cert.witness)}\n")
    if cert.mode == "sampled":
        out.write("certifies=false (sampled mode carries no guarantee)\n")
    else:
        out.write(f"certifies={'true' if cert.holds else 'false'}\n")


def _analyze_vertices(args, out) -> None:
    H = _load_code(args.code)
    P = build_polytope(H)
    census = enumerate_vertices(P)
    out.write(f"vertices={len(census.vertices)}\n")
    out.write(f"integral={len(census.integral_vertices)}\n")
    out.write(f"fractional={len(census.fractional_vertices)}\n")
    for k, v in enumerate(census.fractional_vertices):
        sup = fractional_support(H, v.point)
        coords = " ".join(str(x) for x in v.point)
        out.write(
            f"fractional_{k}: point=({coords}) vfrac={len(sup.bits)} "
            f"cfrac={len(sup.checks)} active={len(v.active)}\n"
        )


def _analyze_constants(args, out) -> None:
    cs = structure_constants(args.rate, args.dc, args.dv, args.alpha, args.delta)
    out.write(f"gamma_cw={cs.gamma_cw:.6g}\n")
    out.write(f"gamma_pc={cs.gamma_pc:.6g}\n")
    out.write(f"c1_threshold={cs.c1_threshold:.6g}\n")
    out.write(f"rfg_bound={cs.rfg_success_bound(args.c1):.6g}\n")


def cmd_analyze(args) -> int:
    out = sys.stdout
    if args.mode == "active-sets":
        _analyze_active_sets(args, out)
    elif args.mode == "expansion":
        _analyze_expansion(args, out)
    elif args.mode == "vertices":
        _analyze_vertices(args, out)
    elif args.mode == "constants":
        _analyze_constants(args, out)
    return 0


def cmd_verify(args) -> int:
    """Bundled structural invariant suite at desk scale, one line per check."""
    from .verify import run_verification

    ok = run_verification(sys.stdout, seed=args.seed)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudopoly")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a regular code and write its alist")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dv", type=int, required=True)
    p.add_argument("--dc", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("decode", help="decode one cost vector")
    p.add_argument("--code", required=True)
    p.add_argument("--llr", required=True)
    p.add_argument("--decoder", choices=("lp", "efg", "rfg"), default="lp")
    p.add_argument("--guesses", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte Carlo channel sweep to CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--code")
    src.add_argument("--gen-spec", help="n,dv,dc,seed")
    p.add_argument("--channel", choices=("awgn", "bsc"), default="awgn")
    p.add_argument("--points", required=True, help="start:step:stop or comma list")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--decoders", required=True, help="e.g. lp,rfg:20,sp:100")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-errors", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="polytope structure reports")
    p.add_argument("--code")
    p.add_argument(
        "--mode",
        choices=("active-sets", "expansion", "vertices", "constants"),
        required=True,
    )
    p.add_argument("--exact", action="store_true")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.51)
    p.add_argument("--expansion-mode", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--rate", "--R", dest="rate", type=float, default=0.25)
    p.add_argument("--dc", type=int, default=4)
    p.add_argument("--dv", type=int, default=3)
    p.add_argument("--c1", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run the bundled structural checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _echo_config(args.command, args)
    needs_code = args.command in ("decode",) or (
        args.command == "analyze" and args.mode != "constants"
    )
    try:
        if needs_code and not args.code:
            raise ValueError(f"--code is required for {args.command}")
        return args.func(args)
    except (ValueError, KeyError, OSError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
