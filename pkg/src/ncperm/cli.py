"""Command-line front end.

Every verb prints one JSON report on standard output (sorted keys) holding
the command, a sha256 digest of its input, the parameters and the results.
The exit code is 0 exactly when the computation succeeded and every check
it performed passed.  ``--selftest`` runs the owning module's oracle corpus.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

from . import checks
from .abp import (AbpError, ReadOnceCertificate, abp_from_json, abp_to_json, exp_sum_readonce,
                  expand_abp, hadamard_abp, infer_certificate)
from .circuit import (CircuitError, all_words, circuit_from_json, expand_circuit, mcoeff,
                      op_bound, pc_circuit, pcoeff_circuit, prefix_quotient)
from .core import NcPoly, VARS, format_fraction, poly_to_json, var
from .gentry import SatError, count_sat, naive_count, parse_dimacs
from .graph import (GraphError, LabeledDigraph, build_cperm_abp, cperm_abp_size_bound,
                    cperm_brute, crossing_counts, cut, interval_edges, near, parse_graph,
                    parse_involution, scc_sorted)
from .nisan import NisanError, hard_involution, involution_experiment, nisan_report
from .sym import SymError, hammon_abp, perm_via_hadamard, rank_one_cperm

INPUT_ERRORS = (AbpError, CircuitError, GraphError, NisanError, SatError, SymError,
                ValueError, KeyError, OSError)


class Report(dict):
    """Result payload plus the verdict that decides the exit code."""

    def __init__(self, ok: bool = True, **fields):
        super().__init__(fields)
        self.ok = ok


def _digest(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return h.hexdigest()


def _read(path: str) -> Tuple[str, bytes]:
    data = Path(path).read_bytes()
    return data.decode("utf-8"), data


def _load_json(path: str):
    text, raw = _read(path)
    try:
        return json.loads(text), raw
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None


def _word(text: str) -> Tuple[int, ...]:
    names = text.replace("*", " ").replace(",", " ").split()
    return tuple(var(n) for n in names)


def _selftest_result(results: Sequence[checks.CheckResult]) -> Report:
    for r in results:
        print(r.line(), file=sys.stderr)
    return Report(all(r.passed for r in results), input_sha256=_digest(b"selftest"),
                  checks=[{"name": r.name, "passed": r.passed,
                           "details": r.details}
                          for r in results])


# VERBS
# -----

def _graph_input(args) -> Tuple[LabeledDigraph, bytes]:
    text, raw = _read(args.graph)
    return parse_graph(text, args.graph), raw


def cmd_cperm(args, signed: bool = False) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_product_form(), checks.check_cperm_abp(n_random=10)])
    g, raw = _graph_input(args)
    p = cperm_brute(g, signed=signed)
    rep = Report(input_sha256=_digest(raw), n=g.n, signed=signed,
                 polynomial=poly_to_json(p), terms=len(p))
    if args.verify:
        q = expand_abp(build_cperm_abp(g, signed=signed, max_component=args.max_component))
        rep["abp_agrees"] = q == p
        rep.ok = q == p
    return rep


def cmd_abp_build(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_cperm_abp(n_random=20)])
    g, raw = _graph_input(args)
    a = build_cperm_abp(g, signed=args.signed, max_component=args.max_component)
    comps = scc_sorted(g)
    c = max(len(x) for x in comps)
    bound = cperm_abp_size_bound(g.n, c, near(g))
    rep = Report(input_sha256=_digest(raw), signed=args.signed, abp=abp_to_json(a),
                 size=a.size, size_bound=bound, max_component=c, near=near(g))
    rep.ok = a.size <= bound
    if args.verify:
        agrees = expand_abp(a) == cperm_brute(g, signed=args.signed)
        rep["brute_agrees"] = agrees
        rep.ok = rep.ok and agrees
    return rep


def cmd_abp_expand(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_expsum(instances=20), checks.check_hadamard()])
    data, raw = _load_json(args.abp)
    a = abp_from_json(data)
    p = expand_abp(a)
    return Report(input_sha256=_digest(raw), size=a.size, polynomial=poly_to_json(p),
                  terms=len(p))


def cmd_abp_expsum(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_expsum()])
    data, raw = _load_json(args.abp)
    a = abp_from_json(data)
    ys = [var(n) for n in args.ys.replace(",", " ").split()]
    if args.cuts:
        cert = ReadOnceCertificate(tuple(int(c) for c in args.cuts.replace(",", " ").split()),
                                   tuple(ys))
    else:
        cert = infer_certificate(a, ys)
    out = exp_sum_readonce(a, cert)
    rep = Report(input_sha256=_digest(raw, args.ys.encode()), ys=[VARS.name(y) for y in ys],
                 cuts=list(cert.cuts), order=[VARS.name(y) for y in cert.assignment],
                 abp=abp_to_json(out), size_in=a.size, size_out=out.size)
    rep.ok = out.size <= 2 * a.size
    if args.verify:
        f = expand_abp(a)
        want = checks._explicit_sum(f, ys)
        rep["explicit_sum_agrees"] = expand_abp(out) == want
        rep.ok = rep.ok and rep["explicit_sum_agrees"]
    return rep


def cmd_abp_hadamard(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_hadamard()])
    da, ra = _load_json(args.abp[0])
    db, rb = _load_json(args.abp[1])
    a, b = abp_from_json(da), abp_from_json(db)
    h = hadamard_abp(a, b)
    rep = Report(input_sha256=_digest(ra, rb), abp=abp_to_json(h), size=h.size)
    if args.verify:
        ok = expand_abp(h) == expand_abp(a).hadamard(expand_abp(b))
        rep["coefficientwise_agrees"] = ok
        rep.ok = ok
    return rep


def _circuit_input(args):
    data, raw = _load_json(args.circuit)
    return circuit_from_json(data), raw


def cmd_mcoeff(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_circuits(instances=20)])
    c, raw = _circuit_input(args)
    w = _word(args.word)
    counter = {"ops": 0}
    val = mcoeff(c, w, counter)
    bound = op_bound(c, max(len(w), 1))
    rep = Report(input_sha256=_digest(raw, args.word.encode()), word=[VARS.name(x) for x in w],
                 coefficient=format_fraction(val), ops=counter["ops"], op_bound=bound)
    rep.ok = counter["ops"] <= bound
    if args.verify:
        rep["expansion_agrees"] = expand_circuit(c)[w] == val
        rep.ok = rep.ok and rep["expansion_agrees"]
    return rep


def cmd_pcoeff(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_circuits(instances=20)])
    c, raw = _circuit_input(args)
    w = _word(args.word)
    q = pcoeff_circuit(c, w)
    p = expand_circuit(q)
    rep = Report(input_sha256=_digest(raw, args.word.encode()), word=[VARS.name(x) for x in w],
                 polynomial=poly_to_json(p), circuit_size=q.size)
    if args.verify:
        rep["expansion_agrees"] = p == prefix_quotient(expand_circuit(c), w)
        rep.ok = rep["expansion_agrees"]
    return rep


def cmd_pc_check(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_circuits(instances=20)])
    c, raw = _circuit_input(args)
    xs = sorted(c.variables(), key=VARS.name)
    d = args.max_len
    pc = pc_circuit(c, d, xs)
    f = expand_circuit(c)
    mismatches = [list(map(VARS.name, w)) for w in all_words(xs, d) if pc(w) != f[w]]
    return Report(not mismatches, input_sha256=_digest(raw), max_len=d,
                  variables=[VARS.name(x) for x in xs], pc_size=pc.circuit.size,
                  words_checked=sum(len(xs) ** k for k in range(1, d + 1)),
                  mismatches=mismatches[:20])


def _involution_input(args):
    if args.involution is not None:
        return parse_involution(args.involution, "--involution"), args.involution.encode()
    text, raw = _read(args.involution_file)
    return parse_involution(text, args.involution_file), raw


def cmd_nisan(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_sandwich(sizes=(4, 6))])
    inv, raw = _involution_input(args)
    rep = nisan_report(inv)
    ok = 2 ** rep["cut"] <= rep["B"] <= rep["abp_nodes"]
    return Report(ok, input_sha256=_digest(raw), sandwich_holds=ok, **rep)


def cmd_cut(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_cut_near(samples=200)])
    inv, raw = _involution_input(args)
    return Report(input_sha256=_digest(raw), n=inv.n, cut=cut(inv),
                  crossings=crossing_counts(inv), interval_edges=interval_edges(inv))


def cmd_near(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_cut_near(samples=200)])
    if args.graph:
        g, raw = _graph_input(args)
        return Report(input_sha256=_digest(raw), n=g.n, near=near(g),
                      components=scc_sorted(g))
    inv, raw = _involution_input(args)
    g = LabeledDigraph.from_involution(inv)
    c, nr = cut(inv), near(g)
    return Report(c <= nr, input_sha256=_digest(raw), n=inv.n, near=nr, cut=c,
                  cut_at_most_near=c <= nr)


def cmd_hard_involution(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_sandwich(sizes=(4, 6, 8))])
    inv = hard_involution(args.n)
    rep = Report(input_sha256=_digest(str(args.n).encode()), n=args.n, images=inv.images,
                 cut=cut(inv))
    if args.report:
        r = nisan_report(inv)
        mid = r["ranks"][args.n // 2]
        rep.update(ranks=r["ranks"], B=r["B"], middle_rank=mid)
        rep.ok = mid == 2 ** (args.n // 2)
    return rep


def cmd_involution_experiment(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_random_involutions(seed=args.seed or 0)])
    if args.seed is None:
        raise ValueError("involution-experiment requires --seed")
    res = involution_experiment(args.n, args.samples, args.seed)
    return Report(res["fraction"] >= args.min_fraction,
                  input_sha256=_digest(f"{args.n}:{args.samples}:{args.seed}".encode()),
                  seed=args.seed, min_fraction=args.min_fraction, **res)


def cmd_satcount(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_s3(),
                                 checks.check_gentry(random_instances=10, max_vars=2)])
    text, raw = _read(args.cnf)
    cnf = parse_dimacs(text, args.cnf)
    rep = count_sat(cnf, signed=args.signed, report=True)
    out = Report(input_sha256=_digest(raw), m=cnf.m, clauses=len(cnf.clauses),
                 signed=args.signed, **rep)
    if args.verify:
        naive = naive_count(cnf)
        out["naive_count"] = naive
        out.ok = naive == rep["count"]
    return out


def cmd_sym_check(args) -> Report:
    if args.selftest:
        return _selftest_result([checks.check_sym()])
    n = args.n
    got = perm_via_hadamard(n, args.signed)
    want = cperm_brute(LabeledDigraph.complete(n), signed=args.signed)
    lhs, rhs = rank_one_cperm(min(n, 6))
    ok = got == want and lhs == rhs
    return Report(ok, input_sha256=_digest(f"{n}:{args.signed}".encode()), n=n,
                  signed=args.signed, hadamard=poly_to_json(got), brute=poly_to_json(want),
                  equal=got == want, rank_one=poly_to_json(lhs), nc_sym=poly_to_json(rhs),
                  rank_one_equal=lhs == rhs, hammon_nodes=hammon_abp(n).size)


# PARSER
# ------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncperm", description=__doc__.splitlines()[0])
    p.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def verb(name: str, fn: Callable, help: str, verify: bool = False):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--selftest", action="store_true", help="run the module's oracle corpus")
        if verify:
            sp.add_argument("--verify", action="store_true",
                            help="cross-check the result against an independent oracle")
        sp.set_defaults(func=fn)
        return sp

    def needs(sp, *flags):
        sp.set_defaults(required_inputs=flags)

    for name, signed in (("cperm", False), ("cdet", True)):
        sp = verb(name, lambda a, s=signed: cmd_cperm(a, s),
                  f"Cayley {'determinant' if signed else 'permanent'} of a graph", True)
        sp.add_argument("--graph")
        sp.add_argument("--max-component", type=int, default=6)
        needs(sp, "graph")

    sp = verb("abp-build", cmd_abp_build, "bounded-component ABP for C-perm", True)
    sp.add_argument("--graph")
    sp.add_argument("--signed", action="store_true")
    sp.add_argument("--max-component", type=int, default=6)
    needs(sp, "graph")

    sp = verb("abp-expand", cmd_abp_expand, "expand an ABP to its polynomial")
    sp.add_argument("--abp")
    needs(sp, "abp")

    sp = verb("abp-expsum", cmd_abp_expsum, "read-once exponential sum over Y-variables", True)
    sp.add_argument("--abp")
    sp.add_argument("--ys", help="comma or space separated Y-variable names")
    sp.add_argument("--cuts", help="explicit certificate cut layers, starting at 0")
    needs(sp, "abp", "ys")

    sp = verb("abp-hadamard", cmd_abp_hadamard, "Hadamard product of two ABPs", True)
    sp.add_argument("--abp", nargs=2, metavar=("A", "B"))
    needs(sp, "abp")

    for name, fn, help in (("mcoeff", cmd_mcoeff, "coefficient of a word in a circuit"),
                           ("pcoeff", cmd_pcoeff, "prefix-quotient circuit for a word")):
        sp = verb(name, fn, help, True)
        sp.add_argument("--circuit")
        sp.add_argument("--word", help="variable names separated by spaces, commas or '*'")
        needs(sp, "circuit", "word")

    sp = verb("pc-check", cmd_pc_check, "coefficient circuit against expansion")
    sp.add_argument("--circuit")
    sp.add_argument("--max-len", type=int, default=4)
    needs(sp, "circuit")

    for name, fn, help in (("nisan", cmd_nisan, "Nisan ranks of C-perm of an involution graph"),
                           ("cut", cmd_cut, "cut of an involution"),
                           ("near", cmd_near, "near parameter of an involution or graph")):
        sp = verb(name, fn, help)
        sp.add_argument("--involution", help='images pi(1..n), e.g. "2 1"')
        sp.add_argument("--involution-file")
        if name == "near":
            sp.add_argument("--graph")
            needs(sp, "involution|involution_file|graph")
        else:
            needs(sp, "involution|involution_file")

    sp = verb("hard-involution", cmd_hard_involution, "the involution i -> i + n/2")
    sp.add_argument("--n", type=int)
    sp.add_argument("--report", action="store_true", help="include Nisan ranks")
    needs(sp, "n")

    sp = verb("involution-experiment", cmd_involution_experiment,
              "cut statistics of random involutions")
    sp.add_argument("--n", type=int, default=400)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--min-fraction", type=float, default=0.9)
    needs(sp, "seed")

    sp = verb("satcount", cmd_satcount, "#SAT of a DIMACS CNF via the block permanent", True)
    sp.add_argument("--cnf")
    sp.add_argument("--signed", action="store_true", help="use the determinant variant")
    needs(sp, "cnf")

    sp = verb("sym-check", cmd_sym_check, "Hadamard route to C-perm / C-det")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--signed", action="store_true")
    return p


def _missing(args) -> Optional[str]:
    for group in getattr(args, "required_inputs", ()):
        options = group.split("|")
        if all(getattr(args, o) in (None, False) for o in options):
            return " or ".join("--" + o.replace("_", "-") for o in options)
    return None


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.selftest:
        missing = _missing(args)
        if missing:
            parser.error(f"{args.command}: {missing} is required")
    try:
        rep = args.func(args)
    except INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"ncperm {args.command}: error: {msg}", file=sys.stderr)
        return 2
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "required_inputs", "output", "command")}
    payload = {"command": args.command, "parameters": params, "ok": rep.ok, "result": dict(rep)}
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.ok else 1


def _json_default(obj):
    if isinstance(obj, NcPoly):
        return poly_to_json(obj)
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
