"""The ``bpmc`` command line."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .automata import Dpa, Nba, check_unambiguous, dump_automaton, parse_automaton
from .bp import BranchingProcess, dump_bp, parse_bp
from .checkers import (
    Verdict,
    check_conba_one_exact,
    check_couba_one,
    check_dpa_one,
    check_finite_one,
    check_ltl_one,
    check_nba_one,
    check_reach_one,
)
from .errors import BpmcError, BudgetExceeded
from .hardness import gen_atm_instance, gen_circuit_instance, parse_atm, parse_circuit
from .ltl import ltl_to_uba, parse_ltl
from .oracle import estimator_curve, kleene_reach_prob, sample_prefix, write_curve_csv, write_kleene_csv
from .safra import DEFAULT_BUDGET, determinize_to_dpa

REPORT_VERSION = 1
PROBLEMS = ("finite1", "reach1", "dpa1", "nba1", "couba1", "conba1", "ltl1")

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _csv(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot write {path}: {e.strerror}") from None


def _load_bp(args) -> BranchingProcess:
    if not args.bp:
        raise UsageError("--bp is required")
    return parse_bp(_read(args.bp))


def _load_aut(args, kind: type) -> Nba | Dpa:
    if not args.aut:
        raise UsageError("--aut is required")
    aut = parse_automaton(_read(args.aut))
    if not isinstance(aut, kind):
        want = "dpa" if kind is Dpa else "nba"
        raise UsageError(f"{args.aut}: expected a '{want};' automaton")
    return aut


def _targets(args, bp: BranchingProcess) -> frozenset[int]:
    if not args.targets:
        raise UsageError("--targets is required")
    names = _csv(args.targets)
    unknown = [n for n in names if n not in bp.types]
    if unknown:
        raise UsageError(f"unknown target type(s): {', '.join(unknown)}")
    return bp.indices(names)


def _budget(args) -> int:
    return args.budget if args.budget is not None else DEFAULT_BUDGET


def run_check(args) -> Verdict:
    bp = _load_bp(args)
    p = args.problem
    if p == "finite1":
        return check_finite_one(bp)
    if p == "reach1":
        return check_reach_one(bp, _targets(args, bp))
    if p == "dpa1":
        return check_dpa_one(bp, _load_aut(args, Dpa))
    if p == "nba1":
        return check_nba_one(bp, _load_aut(args, Nba), budget=_budget(args))
    if p == "couba1":
        return check_couba_one(bp, _load_aut(args, Nba), assume_unambiguous=args.assume_unambiguous)
    if p == "conba1":
        return check_conba_one_exact(bp, _load_aut(args, Nba), budget=_budget(args))
    if args.ltl is None:
        raise UsageError("--ltl is required")
    phi = parse_ltl(args.ltl, bp.types)
    return check_ltl_one(bp, phi, assume_unambiguous=args.assume_unambiguous, budget=args.budget)


def report(v: Verdict, seconds: float) -> dict[str, Any]:
    out: dict[str, Any] = {
        "version": REPORT_VERSION,
        "problem": v.problem,
        "answer": v.label,
        "route": v.route,
    }
    if v.witness is not None:
        out["witness"] = v.witness
    if v.details:
        out["details"] = v.details
    out["timings"] = {"total_seconds": round(seconds, 6)}
    return out


def render(rep: dict[str, Any]) -> str:
    lines = [f"{rep['problem']}: {rep['answer']}", f"  route: {rep['route']}"]
    if "witness" in rep:
        w = " ".join(f"{k}={_fmt(v)}" for k, v in rep["witness"].items())
        lines.append(f"  witness: {w}")
    for k, v in rep.get("details", {}).items():
        lines.append(f"  {k}: {_fmt(v)}")
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(map(str, v)) + ")"
    return str(v)


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    v = run_check(args)
    rep = report(v, time.perf_counter() - t0)
    text = json.dumps(rep, indent=2) + "\n" if args.json else render(rep)
    _write(args.output, text)
    return EXIT_NO if (args.fail_on_no and not v.answer) else EXIT_OK


def cmd_translate(args) -> int:
    if args.what == "ltl2uba":
        if args.ltl is None:
            raise UsageError("--ltl is required")
        if args.alphabet:
            alphabet = _csv(args.alphabet)
        elif args.bp:
            alphabet = list(_load_bp(args).types)
        else:
            raise UsageError("--alphabet or --bp is required")
        uba = ltl_to_uba(parse_ltl(args.ltl, alphabet), alphabet, budget=args.budget or 50000)
        if not check_unambiguous(uba).unambiguous:
            raise AssertionError("tableau output is ambiguous")
        _write(args.output, dump_automaton(uba))
    else:
        nba = _load_aut(args, Nba)
        _write(args.output, dump_automaton(determinize_to_dpa(nba, budget=_budget(args))))
    return EXIT_OK


def cmd_simulate(args) -> int:
    bp = _load_bp(args)
    depth = args.depth if args.depth is not None else 5
    if args.samples is None:
        pre = sample_prefix(bp, depth, args.seed)
        lines = [f"{d}: {' '.join(bp.types[x] for x in pre.types_at(d))}" for d in range(depth + 1)]
        _write(args.output, "\n".join(lines) + "\n")
        return EXIT_OK
    curve = estimator_curve(bp, _targets(args, bp), range(depth + 1), args.samples, args.seed, jobs=args.jobs)
    import io

    buf = io.StringIO()
    write_curve_csv(curve, buf)
    _write(args.output, buf.getvalue())
    return EXIT_OK


def cmd_prob(args) -> int:
    import io

    bp = _load_bp(args)
    res = kleene_reach_prob(bp, _targets(args, bp), max_iter=args.max_iter, tol=args.tol, keep_history=True)
    buf = io.StringIO()
    write_kleene_csv(bp, res, buf)
    _write(args.output, buf.getvalue())
    status = "converged" if res.converged else "not converged"
    print(f"{status} after {res.iterations} iterations", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.what == "circuit":
        if not args.circuit:
            raise UsageError("--circuit is required")
        bp, aut = gen_circuit_instance(parse_circuit(_read(args.circuit)))
        ext = "dpa"
    else:
        if not args.atm or not args.word:
            raise UsageError("--atm and --word are required")
        bp, aut = gen_atm_instance(parse_atm(_read(args.atm)), _csv(args.word), args.variant)
        ext = "nba"
    if args.output:
        _write(f"{args.output}.bp", dump_bp(bp))
        _write(f"{args.output}.{ext}", dump_automaton(aut))
    else:
        _write(None, dump_bp(bp) + "\n" + dump_automaton(aut))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bpmc", description="Qualitative model checking of branching processes.")
    ap.add_argument("--version", action="version", version=f"bpmc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        if "bp" in flags:
            p.add_argument("--bp", metavar="PATH", help="branching process file")
        if "aut" in flags:
            p.add_argument("--aut", metavar="PATH", help="automaton file (nba; or dpa;)")
        if "ltl" in flags:
            p.add_argument("--ltl", metavar="STR", help="LTL formula over the BP types")
        if "targets" in flags:
            p.add_argument("--targets", metavar="CSV", help="comma-separated target types")
        if "budget" in flags:
            p.add_argument("--budget", type=int, metavar="INT", help="state-count cap for exponential constructions")
        p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker cap")
        p.add_argument("-o", "--output", metavar="PATH", help="write output here instead of stdout")

    c = sub.add_parser("check", help="decide P(...) = 1")
    c.add_argument("problem", choices=PROBLEMS)
    common(c, "bp", "aut", "ltl", "targets", "budget")
    c.add_argument("--assume-unambiguous", action="store_true", help="skip the unambiguity check (unsound if ambiguous)")
    c.add_argument("--fail-on-no", action="store_true", help="exit 1 when the answer is NO")
    c.add_argument("--json", action="store_true", help="emit the machine-readable report")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("translate", help="ltl2uba or nba2dpa")
    t.add_argument("what", choices=("ltl2uba", "nba2dpa"))
    common(t, "bp", "aut", "ltl", "budget")
    t.add_argument("--alphabet", metavar="CSV", help="letters for ltl2uba")
    t.set_defaults(func=cmd_translate)

    s = sub.add_parser("simulate", help="sample a tree prefix, or an estimator curve with --samples")
    common(s, "bp", "targets")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--depth", type=int)
    s.add_argument("--samples", type=int)
    s.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prob", help="Kleene iteration for P(every branch hits T), as CSV")
    common(p, "bp", "targets")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_prob)

    g = sub.add_parser("gen", help="generate instances from circuits or alternating TMs")
    g.add_argument("what", choices=("circuit", "atm"))
    g.add_argument("--circuit", metavar="PATH")
    g.add_argument("--atm", metavar="PATH")
    g.add_argument("--word", metavar="CSV")
    g.add_argument("--variant", choices=("nba0", "conba0"), default="nba0")
    g.add_argument("-o", "--output", metavar="PREFIX", help="write PREFIX.bp and PREFIX.dpa/.nba")
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"bpmc: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, BpmcError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"bpmc: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
