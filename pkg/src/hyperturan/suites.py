"""Reproducible experiment batteries and their JSON reports.

Every report has the same layout::

    {"suite", "format", "config", "checks": [...], "sweeps": {...}, "status", "timing"}

Each check is ``{"name", "status", "details"}`` with status PASS, FAIL or
REPORT-ONLY.  Only ``timing`` depends on the machine; everything else is a
function of the config, so two runs of one config agree byte for byte once
timing is dropped.
"""

from __future__ import annotations

import io
import itertools
import os
import random
import time
import warnings
from fractions import Fraction
from typing import Callable

from .algebraic import (
    edge_stats,
    copy_gap_diagnostic,
    rooted_copy_mean,
    nonempty_rate,
)
from .entropy import noninjective_mass, sidorenko_check, verify_entropy_bound, verify_marginals
from .field import SmallFieldWarning
from .hypergraph import Hypergraph, cherry, path_graph, single_edge
from .lifting import build_sunflower, exact_ex, is_sunflower, verify_lifting_identity
from .tree import (
    TreeParams,
    build_tree,
    check_balanced,
    check_edge_bound,
    enumerate_power,
    relabel_whites,
)

REPORT_FORMAT = 1
WORKERS_ENV = "HYPERTURAN_WORKERS"

PASS, FAIL, REPORT_ONLY = "PASS", "FAIL", "REPORT-ONLY"


class ConfigError(ValueError):
    pass


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def tree_grid() -> list[tuple[int, int, int]]:
    out = []
    for k in (2, 3, 4):
        for a in range(k - 1, k + 4):
            for b in range(max(a + 1, a - k + 3), a + 7):
                out.append((k, a, b))
    return out


DEFAULTS: dict[str, dict] = {
    "tree": {
        "grid": None,  # None means the full k in {2,3,4} grid
        "power_params": [[2, 1, 2], [2, 2, 3], [3, 2, 4]],
        "power_s": 3,
        "relabel_seed": 0,
    },
    "algebraic": {
        "rooted_params": [[2, 1, 2]],
        "rooted_q": [3, 5],
        "rooted_seeds": 200,
        "nonempty_params": [[2, 1, 2]],
        "nonempty_q": [3, 5],
        "nonempty_seeds": 200,
        "gap_q": [5, 7],
        "gap_seeds": 50,
        "p_config": 3,
        "edge_q": [3, 5, 7],
        "edge_seeds": 50,
        "sampling": "dense",
        "seed": 0,
    },
    "entropy": {
        "hosts_per_arity": 100,
        "n_max": 12,
        "edge_prob": [0.1, 0.45],
        "seed": 0,
    },
    "lifting": {
        "lifting_n": [4, 5, 6],
        "p3_n": [4, 5, 6, 7],
        "single_edge_k": [2, 3],
        "sunflower_k": [2, 3],
        "sunflower_n": 9,
    },
}


def merge_config(name: str, config: dict | None) -> dict:
    if name not in DEFAULTS:
        raise ConfigError(f"unknown suite {name!r}; choose from {sorted(DEFAULTS)}")
    cfg = dict(DEFAULTS[name])
    for key, value in (config or {}).items():
        if key not in cfg:
            raise ConfigError(f"unknown config field {key!r} for suite {name!r}")
        cfg[key] = value
    return cfg


def _check(name: str, ok: bool | None, details: dict) -> dict:
    status = REPORT_ONLY if ok is None else (PASS if ok else FAIL)
    return {"name": name, "status": status, "details": details}


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


# ---------------------------------------------------------------------------
# tree


def tree_suite(cfg: dict, workers: int = 1) -> tuple[list, dict]:
    checks = []
    grid = [tuple(g) for g in cfg["grid"]] if cfg["grid"] is not None else tree_grid()
    rows = []
    for k, a, b in grid:
        p = TreeParams(k, a, b)
        T = build_tree(p)
        ok, worst, ratio = check_balanced(T)
        shape_ok = T.graph.n_edges == b and T.graph.n == b + k - 1
        rows.append({"k": k, "a": a, "b": b, "balanced": ok, "shape": shape_ok,
                     "worst": list(worst), "worst_ratio": _frac(ratio)})
    checks.append(_check("tree shape and balance", all(r["balanced"] and r["shape"] for r in rows),
                         {"cases": len(rows), "failures": [r for r in rows if not (r["balanced"] and r["shape"])]}))
    rng = random.Random(cfg["relabel_seed"])
    for k, a, b in cfg["power_params"]:
        p = TreeParams(k, a, b)
        T = build_tree(p)
        T2 = relabel_whites(T, rng)
        counts, bad, same = [], 0, True
        for s in range(1, cfg["power_s"] + 1):
            members = enumerate_power(T, s)
            other = enumerate_power(T2, s)
            same &= {H.canonical() for H in members} == {H.canonical() for H in other}
            bad += sum(1 for H in members if not check_edge_bound(H, p))
            counts.append({"s": s, "members": len(members), "exact": sum(1 for H in members if H.tag == s)})
        checks.append(_check(f"power edge bound {k},{a},{b}", bad == 0 and same,
                             {"levels": counts, "violations": bad, "order_independent": same}))
    return checks, {}


# ---------------------------------------------------------------------------
# algebraic


def algebraic_suite(cfg: dict, workers: int = 1) -> tuple[list, dict]:
    checks = []
    seed, sampling = cfg["seed"], cfg["sampling"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallFieldWarning)
        for k, a, b in cfg["rooted_params"]:
            T = build_tree(TreeParams(k, a, b))
            for q in cfg["rooted_q"]:
                r = rooted_copy_mean(k, a, b, T, q, cfg["rooted_seeds"], seed=seed,
                                       sampling=sampling, workers=workers)
                checks.append(_check(f"rooted copy mean {k},{a},{b} q={q}", r["pass"], r))
        for k, a, b in cfg["nonempty_params"]:
            for q in cfg["nonempty_q"]:
                r = nonempty_rate(k, a, b, q, cfg["nonempty_seeds"], seed=seed,
                                  sampling=sampling, workers=workers)
                checks.append(_check(f"nonempty rate {k},{a},{b} q={q}", r["pass"], r))
        k, a, b = cfg["rooted_params"][0]
        r = copy_gap_diagnostic(k, a, b, cfg["gap_q"], cfg["gap_seeds"], p_config=cfg["p_config"],
                              seed=seed, sampling=sampling, workers=workers)
        checks.append(_check("copy-count dichotomy", None, r))
        es = edge_stats(k, a, b, cfg["edge_q"], cfg["edge_seeds"], seed=seed, sampling=sampling, workers=workers)
        checks.append(_check("edge count trend", None, es))
    sweep = [[row["q"], row["mean_edges"], row["ratio"]] for row in es["per_q"]]
    return checks, {"lang_weil": sweep}


# ---------------------------------------------------------------------------
# entropy


def random_host(k: int, rng: random.Random, n_max: int, prob: tuple[float, float]) -> Hypergraph:
    n = rng.randint(k + 1, n_max)
    pr = rng.uniform(*prob)
    edges = [e for e in itertools.combinations(range(n), k) if rng.random() < pr]
    if not edges:
        edges = [tuple(range(k))]
    return Hypergraph(k, n, tuple(edges))


def entropy_patterns() -> dict[int, list[tuple[str, object]]]:
    return {
        2: [("edge", single_edge(2)), ("cherry", cherry()),
            ("tree 2,1,2", build_tree(TreeParams(2, 1, 2))), ("tree 2,2,3", build_tree(TreeParams(2, 2, 3)))],
        3: [("edge", single_edge(3)), ("tree 3,2,4", build_tree(TreeParams(3, 2, 4)))],
    }


def entropy_suite(cfg: dict, workers: int = 1) -> tuple[list, dict]:
    rng = random.Random(cfg["seed"])
    patterns = entropy_patterns()
    stats = {key: {"cases": 0, "failures": []} for key in ("entropy_bound", "marginals", "sidorenko", "injectivity")}
    min_slack = None
    sweep = []
    for k, pats in patterns.items():
        for i in range(cfg["hosts_per_arity"]):
            X = random_host(k, rng, cfg["n_max"], tuple(cfg["edge_prob"]))
            for label, H in pats:
                p1 = verify_entropy_bound(H, X)
                p2 = verify_marginals(H, X)
                sc = sidorenko_check(H, X)
                nm = noninjective_mass(H, X)
                min_slack = p1["slack"] if min_slack is None else min(min_slack, p1["slack"])
                for key, res in (("entropy_bound", p1), ("marginals", p2), ("sidorenko", sc)):
                    stats[key]["cases"] += 1
                    if not res["pass"]:
                        stats[key]["failures"].append({"k": k, "host": i, "pattern": label})
                stats["injectivity"]["cases"] += 1
                if not nm["pass"] or nm["inj_holds"] is False:
                    stats["injectivity"]["failures"].append({"k": k, "host": i, "pattern": label})
                if label == "cherry":
                    sweep.append([X.n, sc["hom_count"], sc["bound_float"]])
    stats["entropy_bound"]["min_slack"] = min_slack
    checks = [_check(name, not s["failures"], s) for name, s in stats.items()]
    return checks, {"sidorenko": sweep}


# ---------------------------------------------------------------------------
# lifting


def lifting_suite(cfg: dict, workers: int = 1) -> tuple[list, dict]:
    checks = []
    P3 = path_graph(3)
    r = verify_lifting_identity([P3], 3, 2, cfg["lifting_n"])
    checks.append(_check("lifting identity", r["pass"], r))
    rows = []
    for n in cfg["p3_n"]:
        v = exact_ex(n, [P3]).value
        rows.append({"n": n, "ex": v, "ok": v in (n - 1, n)})
    checks.append(_check("path of three edges", all(x["ok"] for x in rows), {"rows": rows}))
    rows = []
    for k in cfg["single_edge_k"]:
        for n in range(k, k + 5):
            rows.append({"k": k, "n": n, "ex": exact_ex(n, [single_edge(k)]).value})
    checks.append(_check("single edge", all(x["ex"] == 0 for x in rows), {"rows": rows}))
    rows = []
    for k in cfg["sunflower_k"]:
        for t in range(k):
            G = build_sunflower(k, t, cfg["sunflower_n"])
            rows.append({"k": k, "t": t, "edges": G.n_edges, "ok": is_sunflower(G, range(t))})
    checks.append(_check("sunflower kernels", all(x["ok"] for x in rows), {"rows": rows}))
    return checks, {}


SUITES: dict[str, Callable] = {
    "tree": tree_suite,
    "algebraic": algebraic_suite,
    "entropy": entropy_suite,
    "lifting": lifting_suite,
}


def run_suite(name: str, config: dict | None = None, workers: int | None = None) -> dict:
    cfg = merge_config(name, config)
    if workers is None:
        workers = workers_from_env()
    t0 = time.perf_counter()
    checks, sweeps = SUITES[name](cfg, workers)
    elapsed = time.perf_counter() - t0
    failed = any(c["status"] == FAIL for c in checks)
    return {
        "suite": name,
        "format": REPORT_FORMAT,
        "config": cfg,
        "checks": checks,
        "sweeps": sweeps,
        "status": FAIL if failed else PASS,
        "timing": {"seconds": round(elapsed, 3), "workers": workers},
    }


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


PLOT_COLUMNS = {
    "lang_weil": ["q", "mean_edges", "mean_edges_over_prediction"],
    "sidorenko": ["n", "hom_count", "bound"],
}


def emit_plotdata(report: dict, series: str | None = None) -> str:
    """Tab-separated sweep columns with a header row; header only when there is no data."""
    sweeps = report.get("sweeps") or {}
    if series is None:
        series = next(iter(sweeps), "lang_weil")
    if series not in PLOT_COLUMNS:
        raise ConfigError(f"unknown series {series!r}; choose from {sorted(PLOT_COLUMNS)}")
    buf = io.StringIO()
    buf.write("\t".join(PLOT_COLUMNS[series]) + "\n")
    for row in sweeps.get(series, []):
        buf.write("\t".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")
    return buf.getvalue()
