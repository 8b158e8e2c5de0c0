"""Command-line entry point: ``inducedpaths <subcommand> ...``.

Output goes to stdout as CSV or JSON and depends only on the arguments, so
two identical invocations print identical bytes.  Exit status: 0 success,
1 a verdict failed under ``--strict``, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from typing import Sequence

from . import __version__
from .bounds import FAMILY_ALIASES, MULTI_C, MULTI_K, evaluate, per_i_rows, sparse_sets_bound, two_colour_sets_params, multi_sets_params
from .dfs import VertexOrdering, dfs_run, stop_when
from .experiments import (
    AUDIT_MODES,
    STRATEGIES,
    ColouringStrategy,
    ConfigError,
    SupercriticalConfig,
    ramsey2_trial,
    ramseyk_trial,
    rows_to_csv,
    supercritical_trial,
    sweep,
)
from .graph import GraphError, load_graph
from .guarantees import GuaranteeParams, HypothesesViolated, check_expansion, check_local_density, find_induced_path_guaranteed
from .oracle import longest_gprime_path_induced_in_g_exact, longest_induced_path_exact, max_edges_bounded_set
from .sources import QuerySource, generator_info


class UsageError(Exception):
    pass


# n-relative numeric expressions ---------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"log": math.log, "sqrt": math.sqrt, "exp": math.exp}
_CONSTS = {"e": math.e, "pi": math.pi}


def eval_expr(text: str | float | int, **names: float) -> float:
    """Evaluate ``"7e-7*n"``-style arithmetic over the given names.

    Only numbers, ``+ - * / **``, the names passed in, ``e``, ``pi`` and
    ``log``/``sqrt``/``exp`` are allowed.
    """
    if isinstance(text, (int, float)):
        return float(text)
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError:
        raise UsageError(f"cannot parse expression {text!r}") from None
    env = dict(_CONSTS, **names)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise UsageError(f"unknown name {node.id!r} in {text!r}")
            return env[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise UsageError(f"unsupported syntax in {text!r}")

    try:
        return float(ev(tree))
    except (ArithmeticError, ValueError) as exc:
        raise UsageError(f"cannot evaluate {text!r}: {exc}") from None


def _count(text, **names) -> int:
    value = eval_expr(text, **names)
    if value < 0 or not math.isfinite(value):
        raise UsageError(f"expected a non-negative count, got {text!r}")
    return int(round(value))


# output -----------------------------------------------------------------------------


def _emit(payload: dict, rows: list[dict] | None, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")
    else:
        out.write("# " + json.dumps(payload.get("config", {}), sort_keys=True, default=str) + "\n")
        out.write(rows_to_csv(rows or []))


def _config(args: argparse.Namespace, **resolved) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    cfg.update(resolved)
    cfg["version"] = __version__
    cfg.update(generator_info())
    return cfg


def _seed_list(args) -> list[int]:
    return list(range(args.seed, args.seed + args.seeds))


# subcommands ------------------------------------------------------------------------


def cmd_run_dfs(args, out) -> int:
    if args.input:
        G, labels = load_graph(args.input)
        Gp = load_graph(args.gprime)[0] if args.gprime else G
        n = G.n
        src = QuerySource.fixed(Gp, G)
    else:
        if args.n is None or args.p is None:
            raise UsageError("run-dfs needs --input or both --n and --p")
        n = _count(args.n)
        p = eval_expr(args.p, n=n)
        labels = None
        src = QuerySource.generative(n, p, args.seed)
    pi = VertexOrdering.shuffled(n, args.seed) if args.pi == "shuffled" else None
    stop = None
    if args.stop_s1 or args.stop_s2 or args.stop_path:
        stop = stop_when(
            s1=_count(args.stop_s1, n=n) if args.stop_s1 else None,
            s2=_count(args.stop_s2, n=n) if args.stop_s2 else None,
            path_vertices=_count(args.stop_path, n=n) + 1 if args.stop_path else None,
        )
    rec = dfs_run(n, pi, src, stop, trace_every=args.trace_every)
    d = rec.to_dict(with_trace=bool(args.trace_every))
    if labels is not None:
        d["best_path"] = [labels[v] for v in d["best_path"]]
        d["final_path"] = [labels[v] for v in d["final_path"]]
    payload = {"config": _config(args, n=n), "record": d}
    row = {k: v for k, v in d.items() if not isinstance(v, (list, dict))}
    _emit(payload, d.get("trace") or [row], args.format, out)
    return 0


def _records_out(args, records, extra_cfg, out) -> int:
    rows = [r.to_row() for r in records]
    payload = {"config": _config(args, **extra_cfg), "records": [r.to_dict() for r in records]}
    _emit(payload, rows, args.format, out)
    if args.strict and not all(all(r.verdicts.values()) for r in records):
        return 1
    return 0


def cmd_supercritical(args, out) -> int:
    n = _count(args.n)
    eps = eval_expr(args.eps, n=n)
    cfg = SupercriticalConfig(n=n, epsilon=eps, seeds=tuple(_seed_list(args)), pi_mode=args.pi, trace=bool(args.trace_every),
                              audit=args.audit)
    records = [supercritical_trial(cfg, s) for s in cfg.seeds]
    return _records_out(args, records, {"n": n, "epsilon": eps}, out)


def cmd_ramsey2(args, out) -> int:
    n = _count(args.n)
    ell = eval_expr(args.ell, n=n) if args.ell else None
    records = [ramsey2_trial(n, s, ColouringStrategy(args.strategy, 2, s), scale=args.scale, ell=ell) for s in _seed_list(args)]
    return _records_out(args, records, {"n": n, "ell": ell}, out)


def cmd_ramseyk(args, out) -> int:
    n = _count(args.n)
    k = _count(args.k, n=n)
    c = eval_expr(args.c, n=n, k=k)
    ell = eval_expr(args.ell, n=n, k=k, c=c) if args.ell else None
    records = [ramseyk_trial(n, k, c, s, ColouringStrategy(args.strategy, k, s), scale=args.scale, ell=ell)
               for s in _seed_list(args)]
    return _records_out(args, records, {"n": n, "k": k, "c": c, "ell": ell}, out)


_HEADLINE = {
    "two_colour_sets": ("bracket_le_2280", "bracket_ge_2000", "tail_base_le_0_99"),
    "two_colour_cut": ("base_lt_1_minus_1e7",),
    "multi_sets": ("tail_base_le_half",),
    "multi_cut": ("base_lt_1",),
}


def cmd_bounds(args, out) -> int:
    name = FAMILY_ALIASES.get(args.lemma, args.lemma)
    c = eval_expr(args.c)
    k = eval_expr(args.k)
    n = eval_expr(args.n) if args.n else None
    summary = evaluate(name, n=n, c=c, k=k)
    rows = [{"quantity": key, "value": summary[key]} for key in sorted(summary)]
    per_i = []
    if name in ("two_colour_sets", "multi_sets"):
        params = two_colour_sets_params(int(n) if n else 10 ** 9) if name == "two_colour_sets" else multi_sets_params(c, k, n or 1e18)
        per_i = per_i_rows(sparse_sets_bound(params))
    payload = {"config": _config(args, family=name), "summary": summary, "per_i": per_i}
    if args.format == "csv":
        out.write("# " + json.dumps(payload["config"], sort_keys=True) + "\n")
        out.write(rows_to_csv(rows))
        if per_i:
            out.write("\n")
            out.write(rows_to_csv(per_i))
    else:
        _emit(payload, None, "json", out)
    if args.strict and not all(summary[key] for key in _HEADLINE[name]):
        return 1
    return 0


def cmd_oracle(args, out) -> int:
    G, labels = load_graph(args.input)
    if args.kind == "dense":
        if args.cap is None:
            raise UsageError("--kind dense needs --cap")
        best, witness = max_edges_bounded_set(G, _count(args.cap, n=G.n))
        result = {"edges": best, "witness": witness}
    elif args.gprime:
        Gp = load_graph(args.gprime)[0]
        length, witness = longest_gprime_path_induced_in_g_exact(Gp, G)
        result = {"length": length, "witness": witness}
    else:
        length, witness = longest_induced_path_exact(G)
        result = {"length": length, "witness": witness}
    if labels is not None:
        result["witness"] = [labels[v] for v in result["witness"]]
    if args.format == "csv":
        out.write(rows_to_csv([{k: (" ".join(map(str, v)) if isinstance(v, list) else v) for k, v in result.items()}]))
    else:
        out.write(json.dumps(result, sort_keys=True) + "\n")
    return 0


def cmd_check(args, out) -> int:
    G, labels = load_graph(args.input)
    Gp = load_graph(args.gprime)[0] if args.gprime else G
    n = G.n
    params = GuaranteeParams(_count(args.s1, n=n), _count(args.s2, n=n), _count(args.ell, n=n))
    density = check_local_density(G, params.total, 2 * params.s2)
    expansion = check_expansion(Gp, params.s1, params.s2 + params.ell)
    result = {
        "params": {"s1": params.s1, "s2": params.s2, "ell": params.ell},
        "local_density": density.to_dict(),
        "expansion": expansion.to_dict(),
    }
    ok = density.passed and expansion.passed
    try:
        path = find_induced_path_guaranteed(Gp, G, params)
        result["path"] = [labels[v] for v in path] if labels else path
        result["path_length"] = len(path) - 1
    except HypothesesViolated as exc:
        result["path"] = None
        result["error"] = str(exc)
        ok = False
    result["ok"] = ok
    if args.format == "csv":
        flat = {
            "s1": params.s1, "s2": params.s2, "ell": params.ell,
            "local_density": density.status, "expansion": expansion.status,
            "path_length": result.get("path_length", ""), "ok": ok,
        }
        out.write(rows_to_csv([flat]))
    else:
        out.write(json.dumps(result, sort_keys=True, indent=2) + "\n")
    return 1 if args.strict and not ok else 0


def cmd_sweep(args, out) -> int:
    with open(args.config, encoding="utf-8") as fh:
        text = fh.read()
    res = sweep(text)
    out.write(res.to_json() + "\n" if args.format == "json" else res.to_csv())
    if args.strict and not all(all(v for k, v in row.items() if k.startswith("ok_")) for row in res.rows):
        return 1
    return 0


# parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base 64-bit seed (default 0)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--strict", action="store_true", help="exit 1 if any verdict fails")
    common.add_argument("--trace-every", type=int, default=0, metavar="N", help="record one trace row every N rounds")
    common.add_argument("--scale", type=float, default=1.0, help="multiplier on default (s1, s2, ell)")

    parser = argparse.ArgumentParser(prog="inducedpaths", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-dfs", parents=[common], help="run the search on a graph file or a random graph")
    p.add_argument("--input", help="graph G (edge list or JSON)")
    p.add_argument("--gprime", help="subgraph G' of G (default G' = G)")
    p.add_argument("--n", help="vertex count for a generative run")
    p.add_argument("--p", help="edge probability, may use n (e.g. '1.1/n')")
    p.add_argument("--pi", choices=("identity", "shuffled"), default="identity")
    p.add_argument("--stop-s1")
    p.add_argument("--stop-s2")
    p.add_argument("--stop-path", help="stop once the stack is a path of this many edges")
    p.set_defaults(func=cmd_run_dfs)

    p = sub.add_parser("supercritical", parents=[common], help="search on G(n, (1+eps)/n)")
    p.add_argument("--n", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds from --seed")
    p.add_argument("--pi", choices=("identity", "shuffled"), default="identity")
    p.add_argument("--audit", choices=AUDIT_MODES, default="auto")
    p.set_defaults(func=cmd_supercritical)

    p = sub.add_parser("ramsey2", parents=[common], help="two-colour pipeline on G(n, 64/n)")
    p.add_argument("--n", required=True)
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--strategy", choices=STRATEGIES, default="uniform_random")
    p.add_argument("--ell", help="target length parameter (overrides --scale), may use n")
    p.set_defaults(func=cmd_ramsey2)

    p = sub.add_parser("ramseyk", parents=[common], help="k-colour pipeline on G(kn, c log k / n)")
    p.add_argument("--n", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--strategy", choices=STRATEGIES, default="uniform_random")
    p.add_argument("--ell", help="target length parameter (overrides --scale), may use n, k, c")
    p.set_defaults(func=cmd_ramseyk)

    p = sub.add_parser("bounds", parents=[common], help="evaluate the sparse-set and cut union bounds")
    p.add_argument("--lemma", required=True, choices=sorted(FAMILY_ALIASES) + sorted(FAMILY_ALIASES.values()))
    p.add_argument("--n", help="concrete n for the exact sums")
    p.add_argument("--c", default=str(MULTI_C))
    p.add_argument("--k", default=repr(MULTI_K))
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", parents=[common], help="exact longest induced path / densest bounded set")
    p.add_argument("--input", required=True)
    p.add_argument("--gprime")
    p.add_argument("--kind", choices=("path", "dense"), default="path")
    p.add_argument("--cap", help="set size cap for --kind dense")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", parents=[common], help="check both hypotheses and extract a certified path")
    p.add_argument("--input", required=True)
    p.add_argument("--gprime")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--ell", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", parents=[common], help="run a JSON-configured parameter sweep")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, GraphError, ConfigError, ValueError, OSError) as exc:
        print(f"inducedpaths {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
