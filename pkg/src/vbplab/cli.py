"""Command line front end: ``vbplab gen|solve|lp|mlp|exact|verify|bench``.

Exit status is 0 on success, 1 when a solver fails or a check does not
pass, and 2 on bad usage or malformed input.  Every output is a pure
function of the inputs, flags and seed; wall-clock times are written only
with ``bench --timing``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analysis import verify_lemmas
from .config_lp import PTAS_EPS, column_generation
from .core import Instance, Packing, first_fit, validate_delta
from .errors import InputError, MembershipError, SolverError, VBPError
from .irr import IrrParams, run_irr
from .match_round import run_2vbp
from .matching import mlp_column_generation
from .oracle import LP_CAP, MLP_CAP, OPT_CAP, exact_config_lp, exact_mlp, exact_opt

log = logging.getLogger("vbplab")

KINDS = ("uniform", "large-heavy", "pairs", "adversarial-c2")
ALGOS = ("firstfit", "ffd", "irr", "matchround", "exact")
BENCH_COLUMNS = ("instance_id", "algo", "d", "n", "delta", "seed", "bins", "lp_bound", "mlp_bound",
                 "opt_exact", "ratio_vs_lp", "runtime_ms")
BENCH_EXACT_CAP = 12


class UsageError(Exception):
    pass


def fmt(x: float) -> float:
    """Round to 12 significant digits."""
    return float(f"{float(x):.12g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    return obj


# -- generators ------------------------------------------------------------

def _unit_open(rng, shape, low: float = 0.0) -> np.ndarray:
    """Uniform on (low, 1]."""
    return low + (1.0 - low) * (1.0 - rng.random(shape))


def generate(kind: str, n: int, d: int, seed: int, delta: float = 0.1) -> Instance:
    """Random instance; identical (kind, n, d, seed, delta) gives an identical instance."""
    if n < 0 or d < 1:
        raise UsageError("n must be >= 0 and d >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), KINDS.index(kind) if kind in KINDS else 99]))
    if kind == "uniform":
        v = _unit_open(rng, (n, d))
    elif kind == "large-heavy":
        v = _unit_open(rng, (n, d), low=delta)
    elif kind == "pairs":
        # planted full bins: a and 1 - a share one bin exactly
        half = rng.uniform(0.15, 0.85, size=(n // 2, d))
        rows = [half, 1.0 - half]
        if n % 2:
            rows.append(rng.uniform(0.15, 0.85, size=(1, d)))
        v = np.vstack(rows) if n else np.zeros((0, d))
        v = v[rng.permutation(n)]
    elif kind == "adversarial-c2":
        # dense cliques of mutually compatible near-halves plus a few small items
        big = (3 * n) // 4
        v = np.vstack([
            rng.uniform(0.455, 0.5, size=(big, d)),
            _unit_open(rng, (n - big, d)) * delta,
        ]) if n else np.zeros((0, d))
        v = v[rng.permutation(n)]
    else:
        raise UsageError(f"unknown instance kind {kind!r}; choose from {', '.join(KINDS)}")
    v = np.array([[fmt(x) for x in row] for row in v]).reshape(n, d)
    v = np.clip(v, np.nextafter(0.0, 1.0), 1.0)
    return Instance(v, name=f"{kind}-n{n}-d{d}-s{seed}")


# -- solving ---------------------------------------------------------------

def solve(instance: Instance, algo: str, delta: float, seed: int, pricer: str = "exact") -> Packing:
    if algo == "firstfit":
        return first_fit(instance)
    if algo == "ffd":
        return first_fit(instance, decreasing=True)
    if algo == "irr":
        return run_irr(instance, None, IrrParams(delta, seed, pricer))[0]
    if algo == "matchround":
        if instance.d != 2:
            raise UsageError("matchround needs d=2")
        return run_2vbp(instance, delta, np.random.default_rng(np.random.SeedSequence([int(seed)])), pricer)
    if algo == "exact":
        return exact_opt(instance)[1]
    raise UsageError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")


def _columns(x) -> list:
    return [{"items": list(conf), "weight": w} for conf, w in x.weights]


# -- output ------------------------------------------------------------------

def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=1) + "\n"


def _csv(rows: list, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if row.get(c) is None else _clean(row.get(c)) for c in columns])
    return buf.getvalue()


def _emit(args, obj: dict, rows: list | None = None, columns=None):
    if args.format == "csv":
        if rows is None:
            raise UsageError(f"{args.command} has no csv output")
        _write(_csv(rows, columns), args.out)
    else:
        _write(_json(obj), args.out)


def _load(args) -> Instance:
    if not args.inp:
        raise UsageError("--in is required")
    return Instance.load(args.inp)


# -- subcommands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    validate_delta(args.delta)
    inst = generate(args.kind, args.n, args.d, args.seed, args.delta)
    _write(_json(inst.to_dict()), args.out)
    return 0


def cmd_solve(args) -> int:
    inst = _load(args)
    validate_delta(args.delta)
    pk = solve(inst, args.algo, args.delta, args.seed, args.pricer)
    problems = pk.violations(inst, range(inst.n))
    if problems:
        raise SolverError("; ".join(problems[:5]))
    obj = {"algo": args.algo, "delta": args.delta, "seed": args.seed, **pk.to_dict()}
    rows = [{"bin": b, "items": " ".join(map(str, conf))} for b, conf in enumerate(pk.bins)]
    _emit(args, obj, rows, ("bin", "items"))
    return 0


def cmd_lp(args) -> int:
    inst = _load(args)
    res = column_generation(inst, None, args.delta, pricer=args.pricer, eps=args.eps)
    obj = {"value": res.z, "certified": res.certified, "rounds": res.rounds, "columns": _columns(res.x)}
    rows = [{"weight": w, "items": " ".join(map(str, c))} for c, w in res.x.weights]
    _emit(args, obj, rows, ("weight", "items"))
    return 0


def cmd_mlp(args) -> int:
    inst = _load(args)
    res = mlp_column_generation(inst, args.delta, pricer=args.pricer, eps=args.eps)
    dec = None
    if res.decomposition is not None:
        dec = [{"matching": [list(e) for e in m], "weight": w}
               for m, w in zip(res.decomposition.matchings, res.decomposition.weights)]
    obj = {
        "value": res.value,
        "status": res.status,
        "edges": [list(e) for e in res.graph.edges],
        "projection": list(res.projection),
        "decomposition": dec,
        "columns": _columns(res.x),
    }
    rows = [{"weight": w, "items": " ".join(map(str, c))} for c, w in res.x.weights]
    _emit(args, obj, rows, ("weight", "items"))
    return 0 if res.status == "verified" else 1


def cmd_exact(args) -> int:
    inst = _load(args)
    size, pk = exact_opt(inst)
    obj = {"opt": size, **pk.to_dict(), "config_lp": None, "mlp": None}
    if inst.n <= LP_CAP:
        obj["config_lp"] = exact_config_lp(inst)
    if inst.d == 2 and inst.n <= MLP_CAP:
        try:
            obj["mlp"] = exact_mlp(inst, args.delta)
        except (InputError, VBPError) as exc:
            log.info("exact MLP skipped: %s", exc)
    rows = [{"quantity": k, "value": obj[k]} for k in ("opt", "config_lp", "mlp")]
    _emit(args, obj, rows, ("quantity", "value"))
    return 0


def cmd_verify(args) -> int:
    if args.suite == "solution":
        inst = _load(args)
        if not args.solution:
            raise UsageError("--solution is required for the solution suite")
        with open(args.solution) as fh:
            pk = Packing.from_dict(json.load(fh))
        problems = pk.violations(inst, range(inst.n))
        rows = [{"lemma": "feasibility", "status": "fail" if problems else "pass", "checked": pk.size,
                 "violations": len(problems), "value": pk.size, "detail": "; ".join(problems[:5])}]
    else:
        params = IrrParams(args.delta, args.seed, args.pricer)
        if args.inp:
            instances = [Instance.load(args.inp)]
        else:
            instances = [generate("uniform", args.n, 2, args.seed * 1000 + k, args.delta) for k in range(20)]
        rows = [vars(r) for r in verify_lemmas(instances, params, args.trials)]
    cols = ("lemma", "status", "checked", "violations", "value", "detail")
    _emit(args, {"rows": rows}, rows, cols)
    return 1 if any(r["status"] == "fail" for r in rows) else 0


def _bench_cell(task) -> list:
    inst_id, inst, algos, delta, seed, pricer, timing = task
    lp = column_generation(inst, None, delta, pricer=pricer).z if inst.n else 0.0
    mlp = None
    if inst.d == 2 and inst.n:
        try:
            mlp = mlp_column_generation(inst, delta, pricer=pricer).value
        except (InputError, MembershipError):
            mlp = None
    opt = exact_opt(inst)[0] if inst.n <= BENCH_EXACT_CAP else None
    rows = []
    for algo in algos:
        if algo == "matchround" and inst.d != 2:
            continue
        if algo == "exact" and inst.n > OPT_CAP:
            continue
        t0 = time.perf_counter()
        pk = solve(inst, algo, delta, seed, pricer)
        ms = (time.perf_counter() - t0) * 1000.0
        if not pk.is_valid(inst, range(inst.n)):
            raise SolverError(f"{algo} returned an invalid packing on {inst_id}")
        rows.append({
            "instance_id": inst_id, "algo": algo, "d": inst.d, "n": inst.n, "delta": delta, "seed": seed,
            "bins": pk.size, "lp_bound": lp, "mlp_bound": mlp, "opt_exact": opt,
            "ratio_vs_lp": pk.size / lp if lp > 0 else None,
            "runtime_ms": ms if timing else None,
        })
    return rows


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGOS:
            raise UsageError(f"unknown algorithm {a!r}; choose from {', '.join(ALGOS)}")
    validate_delta(args.delta)
    tasks = []
    for k in range(args.seeds):
        cell_seed = int(np.random.SeedSequence([args.seed, k]).generate_state(1)[0])
        if args.inp:
            inst = Instance.load(args.inp)
            inst_id = args.inp
        else:
            inst = generate(args.kind, args.n, args.d, cell_seed, args.delta)
            inst_id = inst.name
        tasks.append((inst_id, inst, algos, args.delta, cell_seed, args.pricer, args.timing))
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            chunks = list(pool.map(_bench_cell, tasks))
    else:
        chunks = [_bench_cell(t) for t in tasks]
    rows = sorted((r for c in chunks for r in c), key=lambda r: (r["instance_id"], r["seed"], r["algo"]))
    _emit(args, {"rows": rows}, rows, BENCH_COLUMNS)
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vbplab", description="Vector bin packing by configuration LPs and randomized rounding.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="json"):
        sp.add_argument("--delta", type=float, default=0.1)
        sp.add_argument("--eps", type=float, default=PTAS_EPS, help="knapsack accuracy for --pricer ptas")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--in", dest="inp", metavar="PATH")
        sp.add_argument("--out", metavar="PATH", help="default: stdout")
        sp.add_argument("--format", choices=("json", "csv"), default=fmt_default)
        sp.add_argument("--pricer", choices=("exact", "ptas", "bnb"), default="exact")

    g = sub.add_parser("gen", help="generate a random instance")
    common(g)
    g.add_argument("--kind", choices=KINDS, default="uniform")
    g.add_argument("--n", type=int, default=50)
    g.add_argument("--d", type=int, default=2)

    s = sub.add_parser("solve", help="pack an instance")
    common(s)
    s.add_argument("--algo", choices=ALGOS, default="irr")

    sub_lp = sub.add_parser("lp", help="solve the configuration LP")
    common(sub_lp)
    m = sub.add_parser("mlp", help="solve the matching configuration LP (d=2)")
    common(m)
    e = sub.add_parser("exact", help="exact optimum and exact LP values (small n)")
    common(e)

    v = sub.add_parser("verify", help="check a solution or run the lemma suite")
    common(v)
    v.add_argument("--suite", choices=("lemmas", "solution"), default="lemmas")
    v.add_argument("--solution", metavar="PATH")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--n", type=int, default=60, help="instance size for the generated lemma instances")

    b = sub.add_parser("bench", help="run algorithms over generated instances")
    common(b, fmt_default="csv")
    b.add_argument("--kind", choices=KINDS, default="uniform")
    b.add_argument("--n", type=int, default=40)
    b.add_argument("--d", type=int, default=2)
    b.add_argument("--algos", default="firstfit,irr")
    b.add_argument("--seeds", type=int, default=10)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--timing", action="store_true", help="fill runtime_ms (output is then not reproducible)")
    return p


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "lp": cmd_lp, "mlp": cmd_mlp, "exact": cmd_exact,
            "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"vbplab: {exc}", file=sys.stderr)
        return 2
    except (SolverError, MembershipError) as exc:
        print(f"vbplab: solver error: {exc}", file=sys.stderr)
        return 1
    except (VBPError, OSError, ValueError) as exc:
        print(f"vbplab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
