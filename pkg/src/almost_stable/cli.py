"""Command-line front end.

Every command prints flat ``key=value`` lines on standard output.  Exit codes:
0 yes/success, 1 no, 2 input or usage error, 3 internal failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import formats
from .core import A, B, Answer, Matching, blocking_edges, symmetric_difference
from .errors import AlmostStableError, FamilyTooLarge, InputError, InstanceTooLarge, TooLargeToVerify
from .fpt import LsAsmQuery, solve_derandomized, solve_randomized
from .knapsack import KnapsackInstance, solve_2dkp
from .oracle import oracle_asm, oracle_lsasm
from .reductions import (
    build_asm_reduction,
    build_lsasm_reduction,
    check_artifacts,
    format_mcq,
    pad_mcq,
    padded_sizes,
    parse_mcq,
)
from .stable import gale_shapley
from .usfam import MODES, build_lopsided_family, format_family, verify_lopsided

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
# limits exceeded by the input itself count as input errors
_INPUT_ERRORS = (InputError, InstanceTooLarge, TooLargeToVerify, FamilyTooLarge, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(out, **fields):
    for key, value in fields.items():
        if isinstance(value, bool):
            value = "yes" if value else "no"
        elif isinstance(value, float):
            value = f"{value:.6f}"
        elif isinstance(value, (list, tuple)):
            value = ",".join(map(str, value))
        print(f"{key}={value}", file=out)


def _report(out, answer: Answer, cert_path: str | None):
    """Answer line, certificate path and flattened stats."""
    fields = {"answer": answer.yes}
    if answer.yes and cert_path:
        formats.write_matching(cert_path, answer.eta)
        fields["certificate"] = cert_path
    if answer.yes:
        fields["size"] = len(answer.eta)
    for key in sorted(answer.stats):
        fields[key] = answer.stats[key]
    if answer.caveats:
        fields["caveats"] = answer.caveats
    _emit(out, **fields)
    return EXIT_YES if answer.yes else EXIT_NO


def _recheck(instance, mu, eta, k, q, t):
    """Re-verify a certificate from scratch; raise on any failure."""
    eta = Matching(instance, eta.edges)
    problems = []
    if len(eta) < len(mu) + t:
        problems.append("too small")
    if len(blocking_edges(instance, eta)) > k:
        problems.append("too many blocking edges")
    if q is not None and symmetric_difference(mu, eta)[1] > q:
        problems.append("too far from the reference matching")
    if problems:
        raise AlmostStableError("certificate failed re-verification: " + ", ".join(problems))


def cmd_solve_stable(args, out):
    inst = formats.read_instance(args.instance)
    mu = gale_shapley(inst, args.proposing)
    if args.out:
        formats.write_matching(args.out, mu)
        _emit(out, certificate=args.out)
    else:
        _emit(out, matching=[f"{a}:{b}" for a, b in mu.sorted_edges()])
    _emit(out, size=len(mu), blocking=len(blocking_edges(inst, mu)))
    return EXIT_YES


def cmd_solve_asm_oracle(args, out):
    inst = formats.read_instance(args.instance)
    ans = oracle_asm(inst, args.k, args.t)
    if ans.yes:
        _recheck(inst, gale_shapley(inst), ans.eta, args.k, None, args.t)
    return _report(out, ans, args.out)


def cmd_solve_lsasm(args, out):
    inst = formats.read_instance(args.instance)
    mu = formats.read_matching(args.matching, inst)
    if args.mode == "oracle":
        ans = oracle_lsasm(inst, mu, args.k, args.q, args.t)
    else:
        query = LsAsmQuery(inst, mu, args.k, args.q, args.t)
        if args.mode == "random":
            ans = solve_randomized(
                query, seed=args.seed, repetitions=args.reps, workers=args.threads, count_all=args.count_all
            )
        else:
            ans = solve_derandomized(query, mode=args.family_mode, seed=args.seed, count_all=args.count_all)
    if ans.yes:
        _recheck(inst, mu, ans.eta, args.k, args.q, args.t)
    _emit(out, mode=args.mode)
    return _report(out, ans, args.out)


def cmd_verify_matching(args, out):
    inst = formats.read_instance(args.instance)
    eta = formats.read_matching(args.matching, inst)
    blocking = blocking_edges(inst, eta)
    fields = {"size": len(eta), "blocking": len(blocking), "stable": not blocking}
    ok = True
    if args.mu:
        mu = formats.read_matching(args.mu, inst)
        sd = symmetric_difference(mu, eta)[1]
        fields.update(reference_size=len(mu), sym_diff=sd)
        ok = (args.q is None or sd <= args.q) and len(eta) >= len(mu) + args.t
    ok = ok and (args.k is None or len(blocking) <= args.k)
    fields["valid"] = ok
    _emit(out, **fields)
    return EXIT_YES if ok else EXIT_NO


def cmd_usfam(args, out):
    fam = build_lopsided_family(args.n, args.p, args.q, args.mode, args.seed)
    fields = {"n": args.n, "p": args.p, "q": args.q, "mode": fam.mode, "sets": len(fam)}
    if fam.sampling_budget is not None:
        fields.update(sampling_budget=fam.sampling_budget, attempts=fam.attempts)
    ok = True
    if args.verify:
        ok, witness = verify_lopsided(fam)
        fields["verified"] = ok
        if witness:
            fields["witness_a"] = sorted(witness[0])
            fields["witness_b"] = sorted(witness[1])
    text = format_family(fam.masks)
    if args.out:
        Path(args.out).write_text(text)
        fields["family"] = args.out
        _emit(out, **fields)
    else:
        # the family itself owns stdout; the report goes to stderr
        sys.stdout.write(text)
        _emit(sys.stderr, **fields)
    return EXIT_YES if ok else EXIT_NO


def _write_artifacts(art, source_text: str, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    formats.write_instance(out_dir / "instance.asm", art.instance)
    formats.write_matching(out_dir / "mu.matching", art.mu)
    params = {"reduction": art.kind, "k": art.mcq.k, "k_prime": art.k_prime, "q": art.q, "t": art.t}
    if art.kind == "asm":
        n, m = padded_sizes(art.mcq)
        params.update(embedded_q=art.embedded_q, r=art.r, n=n, m=m)
    params.update(vertices=art.instance.n_agents, mu_size=len(art.mu))
    (out_dir / "params.txt").write_text("".join(f"{k}={v}\n" for k, v in params.items()))
    source = {}
    for v, names in art.vertex_map.items():
        source.update(dict.fromkeys(names, v))
    for e, names in art.edge_map.items():
        source.update(dict.fromkeys(names, e))
    rows = ["name\tside\tindex\trole\tsource"]
    for name, (side, idx) in art.index.items():
        rows.append(f"{name}\t{side}\t{idx}\t{art.roles[name]}\t{source.get(name, '-')}")
    (out_dir / "maps.tsv").write_text("\n".join(rows) + "\n")
    (out_dir / "source.mcq").write_text(source_text)
    return params


def cmd_gen(args, out):
    mcq = parse_mcq(Path(args.mcq).read_text())
    if args.kind == "asm-from-mcq":
        art = build_asm_reduction(pad_mcq(mcq, args.n, args.m), r=args.r, strict=args.strict)
    else:
        art = build_lsasm_reduction(mcq)
    params = _write_artifacts(art, format_mcq(mcq), Path(args.out_dir))
    _emit(out, out_dir=args.out_dir, **params)
    return EXIT_YES


def _read_params(path: Path) -> dict[str, str]:
    out = {}
    for line in path.read_text().splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def cmd_verify_reduction(args, out):
    d = Path(args.dir)
    params = _read_params(d / "params.txt")
    mcq = parse_mcq((d / "source.mcq").read_text())
    if params.get("reduction") == "asm":
        art = build_asm_reduction(pad_mcq(mcq, int(params["n"]), int(params["m"])), r=int(params["r"]))
    elif params.get("reduction") == "lsasm":
        art = build_lsasm_reduction(mcq)
    else:
        raise InputError("params.txt names no known reduction")
    failures = []
    inst = formats.read_instance(d / "instance.asm")
    if inst != art.instance:
        failures.append("instance.asm differs from the regenerated instance")
    else:
        mu = formats.read_matching(d / "mu.matching", inst)
        if mu != art.mu:
            failures.append("mu.matching differs from the regenerated matching")
    for key in ("k_prime", "q", "t"):
        if int(params.get(key, -1)) != getattr(art, key):
            failures.append(f"params.txt has {key}={params.get(key)}, expected {getattr(art, key)}")
    clique = [v for v in args.clique.split(",") if v] if args.clique else None
    failures += check_artifacts(art, clique)
    _emit(out, reduction=art.kind, checks_failed=len(failures))
    for f in failures:
        print(f"failure={f}", file=out)
    return EXIT_YES if not failures else EXIT_NO


def cmd_knapsack(args, out):
    items = []
    for token in args.items:
        parts = token.split(",")
        if len(parts) != 3:
            raise InputError(f"item {token!r} is not 'k,q,t'")
        items.append(tuple(int(x) for x in parts))
    sel = solve_2dkp(KnapsackInstance.of(items, args.c1, args.c2, args.p))
    _emit(out, answer=sel is not None)
    if sel is not None:
        _emit(out, selection=list(sel))
    return EXIT_YES if sel is not None else EXIT_NO


def _non_negative(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{v} is negative")
    return v


def _positive(text):
    v = _non_negative(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="almost-stable", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(
        dest="command",
        required=True,
        parser_class=_Parser,
        metavar="{solve-stable,solve-asm-oracle,solve-lsasm,verify-matching,usfam,gen,verify-reduction}",
    )

    p = sub.add_parser("solve-stable", help="Gale-Shapley stable matching")
    p.add_argument("--instance", required=True)
    p.add_argument("--proposing", choices=(A, B), default=A)
    p.add_argument("--out", help="write the matching file here")
    p.set_defaults(func=cmd_solve_stable)

    p = sub.add_parser("solve-asm-oracle", help="exact ASM decision on small instances")
    p.add_argument("--instance", required=True)
    p.add_argument("-k", type=_non_negative, required=True)
    p.add_argument("-t", type=_non_negative, required=True)
    p.add_argument("--out", help="certificate path")
    p.set_defaults(func=cmd_solve_asm_oracle)

    p = sub.add_parser("solve-lsasm", help="local-search ASM decision")
    p.add_argument("--instance", required=True)
    p.add_argument("--matching", required=True, help="stable reference matching")
    p.add_argument("-k", type=_non_negative, required=True)
    p.add_argument("-q", type=_non_negative, required=True)
    p.add_argument("-t", type=_non_negative, required=True)
    p.add_argument("--mode", choices=("oracle", "random", "derand"), default="derand")
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--reps", type=_positive, help="repetitions for --mode random")
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--family-mode", choices=MODES[1:], default="random-verified")
    p.add_argument("--count-all", action="store_true", help="charge every blocking edge to each component")
    p.add_argument("--out", help="certificate path")
    p.set_defaults(func=cmd_solve_lsasm)

    p = sub.add_parser("verify-matching", help="check a matching against budgets")
    p.add_argument("--instance", required=True)
    p.add_argument("--matching", required=True)
    p.add_argument("--mu", help="reference matching")
    p.add_argument("-k", type=_non_negative)
    p.add_argument("-q", type=_non_negative)
    p.add_argument("-t", type=_non_negative, default=0)
    p.set_defaults(func=cmd_verify_matching)

    p = sub.add_parser("usfam", help="lopsided universal family")
    p.add_argument("--n", type=_non_negative, required=True)
    p.add_argument("--p", type=_non_negative, required=True)
    p.add_argument("--q", type=_non_negative, required=True)
    p.add_argument("--mode", choices=MODES, default="random-verified")
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_usfam)

    p = sub.add_parser("gen", help="generate a reduction instance from an MCQ file")
    p.add_argument("kind", choices=("asm-from-mcq", "lsasm-from-mcq"))
    p.add_argument("--mcq", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--r", type=_non_negative, help="edge slots per base path (ASM)")
    p.add_argument("--strict", action="store_true", help="require every real vertex to have degree r (ASM)")
    p.add_argument("--n", type=_non_negative, help="minimum padded part size (ASM)")
    p.add_argument("--m", type=_non_negative, help="minimum padded edge-set size (ASM)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify-reduction", help="re-check a generated reduction directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--clique", help="comma-separated multicolored clique to embed")
    p.set_defaults(func=cmd_verify_reduction)

    p = sub.add_parser("knapsack")  # hidden: no help entry
    p.add_argument("--items", nargs="*", default=[], help="items as k,q,t")
    p.add_argument("--c1", type=_non_negative, required=True)
    p.add_argument("--c2", type=_non_negative, required=True)
    p.add_argument("--p", type=_non_negative, required=True)
    p.set_defaults(func=cmd_knapsack)
    return parser


def main(argv=None) -> int:
    out = sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"internal error: {msg}", file=sys.stderr)
        if os.environ.get("ALMOST_STABLE_DEBUG"):
            raise
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
