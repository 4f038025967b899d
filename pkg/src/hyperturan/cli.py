"""Command-line front end.

Every command prints one JSON document (or writes it to ``--out``).  Exit
status is 0 when all hard checks pass, 1 when one fails and 2 for usage
errors.  ``--config FILE`` supplies any option as a JSON object keyed by the
option's long name with dashes turned into underscores; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import algebraic as alg
from . import entropy as ent
from . import lifting as lif
from .field import FieldError, MultiPoly, SmallFieldWarning
from .hypergraph import Hypergraph, HypergraphError
from .suites import ConfigError, emit_plotdata, run_suite, workers_from_env
from .tree import (
    RootedGraph,
    RootedTree,
    TreeParamError,
    TreeParams,
    build_tree,
    check_balanced,
    check_edge_bound,
    enumerate_power,
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def load_json(arg: str | None, what: str):
    """Inline JSON text or a path to a JSON file."""
    if arg is None:
        raise UsageError(f"missing {what}")
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {what} from {arg!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def parse_pattern(arg: str):
    """``tree:k,a,b`` or hypergraph JSON, optionally with a ``roots`` list."""
    if arg.startswith("tree:"):
        k, a, b = (int(x) for x in arg[5:].split(","))
        return build_tree(TreeParams(k, a, b))
    data = load_json(arg, "pattern")
    G = Hypergraph.from_json(data)
    if data.get("roots") is not None:
        return RootedGraph(G, tuple(int(r) for r in data["roots"]))
    return G


def parse_family(arg: str) -> list[Hypergraph]:
    data = load_json(arg, "family")
    if isinstance(data, dict):
        data = data.get("members", [data] if "edges" in data else None)
    if not isinstance(data, list):
        raise UsageError("family must be a list of hypergraphs or {\"members\": [...]}")
    return [Hypergraph.from_json(x) for x in data]


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def name_list(text: str) -> list[str]:
    return [x.strip() for x in str(text).split(",") if x.strip()]


def need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


def tree_params(args) -> TreeParams:
    need(args, "k", "a", "b")
    return TreeParams(args.k, args.a, args.b)


def pattern_json(H) -> dict:
    if isinstance(H, RootedGraph):
        out = H.graph.to_json()
        out["roots"] = list(H.roots)
        if isinstance(H, RootedTree):
            out.update(H.sidecar())
        return out
    return H.to_json()


# ---------------------------------------------------------------------------
# commands; each returns (payload, ok) where ok=None means nothing was asserted


def cmd_tree_build(args):
    T = build_tree(tree_params(args))
    p = T.params
    return {"params": {"k": p.k, "a": p.a, "b": p.b}, "tree": pattern_json(T)}, None


def cmd_tree_check_balanced(args):
    T = build_tree(tree_params(args))
    ok, worst, ratio = check_balanced(T)
    return {"balanced": ok, "worst_subset": list(worst), "worst_ratio": str(ratio),
            "target_ratio": str(T.params.ratio)}, ok


def cmd_tree_power(args):
    p = tree_params(args)
    need(args, "s")
    T = build_tree(p)
    members = enumerate_power(T, args.s)
    if args.exact:
        members = [H for H in members if H.tag == args.s]
    out = [{"tag": H.tag, "edge_bound": check_edge_bound(H, p), **pattern_json(H)} for H in members]
    ok = all(m["edge_bound"] for m in out)
    return {"k": p.k, "a": p.a, "b": p.b, "s": args.s, "count": len(out), "members": out}, ok


def construction(args) -> alg.ConstructionParams:
    need(args, "k", "a", "b", "q")
    return alg.ConstructionParams(args.k, args.a, args.b, args.q, args.seed, args.sampling)


def cmd_alg_build(args):
    params = construction(args)
    polys = None
    if args.polys is not None:
        data = load_json(args.polys, "polynomials")
        polys = [MultiPoly.from_json(x) for x in (data if isinstance(data, list) else [data])]
    inst = alg.build_instance(params, polys)
    return inst.to_json(), None


def cmd_alg_edge_stats(args):
    need(args, "k", "a", "b", "q_list", "seeds")
    return alg.edge_stats(args.k, args.a, args.b, args.q_list, args.seeds, seed=args.seed,
                          sampling=args.sampling, workers=workers_from_env()), None


def cmd_alg_nonempty(args):
    need(args, "k", "a", "b", "q", "seeds")
    r = alg.nonempty_rate(args.k, args.a, args.b, args.q, args.seeds, seed=args.seed,
                          sampling=args.sampling, workers=workers_from_env())
    return r, r["pass"]


def cmd_alg_rooted_copies(args):
    need(args, "k", "a", "b", "q", "seeds")
    H = parse_pattern(args.H) if args.H else build_tree(TreeParams(args.k, args.a, args.b))
    if not isinstance(H, RootedGraph):
        raise UsageError("the pattern needs a roots list")
    r = alg.rooted_copy_mean(args.k, args.a, args.b, H, args.q, args.seeds, seed=args.seed,
                               sampling=args.sampling, workers=workers_from_env())
    return r, r["pass"]


def cmd_alg_copy_gap(args):
    need(args, "k", "a", "b", "q_list", "seeds")
    return alg.copy_gap_diagnostic(args.k, args.a, args.b, args.q_list, args.seeds, p_config=args.p,
                                 seed=args.seed, sampling=args.sampling, workers=workers_from_env()), None


def cmd_alg_freeness(args):
    if args.instance is not None:
        inst = alg.instance_from_json(load_json(args.instance, "instance"))
        params = inst.params
    else:
        params = construction(args)
        inst = alg.build_instance(params)
    r = alg.freeness(inst, params.tree, args.p)
    r["instance"] = params.to_json()
    return r, None


def host_arg(args) -> Hypergraph:
    need(args, "X")
    return Hypergraph.from_json(load_json(args.X, "host"))


def cmd_entropy_mu(args):
    need(args, "H")
    table = ent.build_mu(parse_pattern(args.H), host_arg(args))
    out = table.to_json()
    out["total"] = str(table.total())
    out["D"] = ent.entropy_D(table)
    return out, None


def cmd_entropy_verify(args):
    need(args, "H")
    H, X = parse_pattern(args.H), host_arg(args)
    out, ok = {}, True
    checks = {"entropy_bound": ent.verify_entropy_bound, "marginals": ent.verify_marginals}
    for name in args.checks:
        if name not in checks:
            raise UsageError(f"unknown check {name!r}; choose from {sorted(checks)}")
        r = out[name] = checks[name](H, X)
        ok &= r["pass"]
    return out, ok


def cmd_entropy_sidorenko(args):
    need(args, "H")
    r = ent.sidorenko_check(parse_pattern(args.H), host_arg(args))
    return r, r["pass"]


def cmd_entropy_inj_bound(args):
    need(args, "H")
    r = ent.noninjective_mass(parse_pattern(args.H), host_arg(args))
    return r, r["pass"] and r["inj_holds"] is not False


def cmd_entropy_find_power(args):
    p = tree_params(args)
    X = host_arg(args)
    w = ent.find_power_copy(X, p, args.p)
    return {"p": args.p, "p_prime": ent.copy_threshold(args.p, p.a),
            "density_threshold": ent.density_threshold(args.p, p, X.n),
            "edges": X.n_edges, "witness": w}, None


def cmd_lift_build(args):
    need(args, "family", "k")
    return {"k": args.k, "members": [lif.lift_member(F, args.k).to_json() for F in parse_family(args.family)]}, None


def cmd_lift_verify(args):
    need(args, "family", "k", "l", "n_min", "n_max")
    r = lif.verify_lifting_identity(parse_family(args.family), args.k, args.l, range(args.n_min, args.n_max + 1),
                          budget=args.budget)
    return r, r["pass"]


def cmd_oracle_ex(args):
    need(args, "n", "k")
    family = parse_family(args.family) if args.family else []
    r = lif.exact_ex(args.n, family, args.k, mode=args.mode, budget=args.budget)
    return r.to_json(), None


def cmd_sunflower_build(args):
    need(args, "k", "t", "n")
    G = lif.build_sunflower(args.k, args.t, args.n)
    return {"graph": G.to_json(), "kernel": list(range(args.t)),
            "kernel_exact": lif.is_sunflower(G, range(args.t))}, None


def cmd_suite_run(args):
    cfg = load_json(args.suite_config, "suite config") if args.suite_config else None
    r = run_suite(args.name, cfg)
    return r, r["status"] == "PASS"


def cmd_plotdata(args):
    need(args, "report")
    return emit_plotdata(load_json(args.report, "report"), args.series), None


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperturan", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with option values")
    parser.add_argument("--out", help="write the result here instead of stdout")
    top = parser.add_subparsers(dest="group", metavar="COMMAND")

    def leaf(sub, name, fn, *opts, help=None):
        sp = sub.add_parser(name, help=help)
        # also accepted after the command name
        sp.add_argument("--config", default=argparse.SUPPRESS, help="JSON file with option values")
        sp.add_argument("--out", default=argparse.SUPPRESS, help="write the result here instead of stdout")
        for o in opts:
            o(sp)
        sp.set_defaults(func=fn, _parser=sp)
        return sp

    def kab(sp):
        sp.add_argument("--k", type=int)
        sp.add_argument("--a", type=int)
        sp.add_argument("--b", type=int)

    def rand(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--sampling", choices=alg.SAMPLING_MODES, default="dense")

    def opt(name, **kw):
        return lambda sp: sp.add_argument(name, **kw)

    g = top.add_parser("tree", help="the rooted hypertree and its powers").add_subparsers(dest="cmd", metavar="CMD")
    leaf(g, "build", cmd_tree_build, kab)
    leaf(g, "check-balanced", cmd_tree_check_balanced, kab)
    leaf(g, "power", cmd_tree_power, kab, opt("--s", type=int),
         opt("--exact", action="store_true", help="only members needing exactly s copies"))

    g = top.add_parser("alg", help="random algebraic hosts").add_subparsers(dest="cmd", metavar="CMD")
    q = opt("--q", type=int)
    seeds = opt("--seeds", type=int)
    qlist = opt("--q-list", type=int_list)
    leaf(g, "build", cmd_alg_build, kab, q, rand, opt("--polys", help="polynomial JSON (list) instead of sampling"))
    leaf(g, "edge-stats", cmd_alg_edge_stats, kab, qlist, seeds, rand)
    leaf(g, "nonempty", cmd_alg_nonempty, kab, q, seeds, rand)
    leaf(g, "rooted-copies", cmd_alg_rooted_copies, kab, q, seeds, rand, opt("--H", help="rooted pattern; default is the tree"))
    leaf(g, "copy-gap", cmd_alg_copy_gap, kab, qlist, seeds, rand, opt("--p", type=int, default=3))
    leaf(g, "freeness", cmd_alg_freeness, kab, q, rand, opt("--p", type=int, default=3),
         opt("--instance", help="instance JSON from 'alg build'"))

    g = top.add_parser("entropy", help="hom distributions and counting bounds").add_subparsers(dest="cmd", metavar="CMD")
    HX = [opt("--H", help="pattern JSON or tree:k,a,b"), opt("--X", help="host JSON")]
    leaf(g, "mu", cmd_entropy_mu, *HX)
    leaf(g, "verify", cmd_entropy_verify, *HX, opt("--checks", type=name_list, default=["entropy_bound", "marginals"]))
    leaf(g, "sidorenko", cmd_entropy_sidorenko, *HX)
    leaf(g, "inj-bound", cmd_entropy_inj_bound, *HX)
    leaf(g, "find-power", cmd_entropy_find_power, kab, HX[1], opt("--p", type=int, default=3))

    budget = opt("--budget", type=int, default=lif.DEFAULT_BUDGET)
    g = top.add_parser("lift", help="lifted families").add_subparsers(dest="cmd", metavar="CMD")
    fam = opt("--family", help="JSON list of hypergraphs")
    leaf(g, "build", cmd_lift_build, fam, opt("--k", type=int))
    leaf(g, "verify-lifting", cmd_lift_verify, fam, opt("--k", type=int), opt("--l", type=int),
         opt("--n-min", type=int), opt("--n-max", type=int), budget)

    g = top.add_parser("oracle", help="exact Turán numbers").add_subparsers(dest="cmd", metavar="CMD")
    leaf(g, "ex", cmd_oracle_ex, opt("--n", type=int), opt("--k", type=int), fam, budget,
         opt("--mode", choices=("auto", "exhaustive", "bnb"), default="auto"))

    g = top.add_parser("sunflower", help="sunflower hosts").add_subparsers(dest="cmd", metavar="CMD")
    leaf(g, "build", cmd_sunflower_build, opt("--k", type=int), opt("--t", type=int), opt("--n", type=int))

    g = top.add_parser("suite", help="acceptance batteries").add_subparsers(dest="cmd", metavar="CMD")
    leaf(g, "run", cmd_suite_run, opt("name", choices=("tree", "algebraic", "entropy", "lifting")),
         opt("--suite-config", help="JSON overrides for the suite grid"))

    leaf(top, "plotdata", cmd_plotdata, opt("--report", help="suite report JSON"),
         opt("--series", choices=("lang_weil", "sidorenko")))
    return parser


def _apply_config(args, path: str) -> None:
    data = load_json(path, "config")
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    sp = args._parser
    explicit = {a.dest: a.default for a in sp._actions}
    for key, value in data.items():
        if key not in explicit or key in ("help", "func", "_parser", "config", "out"):
            raise UsageError(f"config field {key!r} is not an option of this command")
        # flags given on the command line keep their value
        if getattr(args, key) == explicit[key]:
            if key == "q_list" and isinstance(value, str):
                value = int_list(value)
            elif key == "checks" and isinstance(value, str):
                value = name_list(value)
            setattr(args, key, value)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        if args.config:
            _apply_config(args, args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SmallFieldWarning)
            payload, ok = args.func(args)
    except (UsageError, ConfigError, TreeParamError, FieldError, HypergraphError, alg.ConstructionError,
            ent.DistributionError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except lif.SearchBudgetError as exc:
        payload, ok = {"error": str(exc), "lower": exc.lower, "upper": exc.upper}, False
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True, default=str)
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 1 if ok is False else 0


if __name__ == "__main__":
    sys.exit(main())
