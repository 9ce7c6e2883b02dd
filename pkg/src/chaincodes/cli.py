"""Command-line interface.

Commands read a complex (or a report carrying one) from ``--in`` or stdin
and write a report with an embedded run manifest, so they compose in pipes:

    chaincodes complex build --graph petersen --power 2 --mod 2 | chaincodes complex betti

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from fractions import Fraction
from importlib import metadata

import numpy as np

from . import acceptance, chain, codes, graphs, stabsim, statmech, toric
from .schemas import validate

log = logging.getLogger("chaincodes")

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _plain(obj):
    """JSON-friendly copy: numpy scalars/arrays, Fractions and infinities."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _digest(data) -> str:
    raw = data if isinstance(data, bytes) else json.dumps(data, sort_keys=True).encode()
    return hashlib.sha256(raw).hexdigest()


# ---------------------------------------------------------------------------
# input helpers


class Context:
    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}
        self._stdin = None

    def read_json(self, path: str | None, what: str) -> dict:
        if path in (None, "-"):
            if self._stdin is None:
                if sys.stdin is None or sys.stdin.isatty():
                    raise UsageError(f"no {what} given: pass --in FILE or pipe JSON on stdin")
                self._stdin = sys.stdin.buffer.read()
            raw, key = self._stdin, "<stdin>"
        else:
            try:
                with open(path, "rb") as fh:
                    raw = fh.read()
            except OSError as exc:
                raise UsageError(str(exc)) from None
            key = path
        if not raw.strip():
            raise UsageError(f"no {what} given: input is empty")
        self.inputs[key] = _digest(raw)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{what} is not valid JSON: {exc}") from None

    def complex(self, path: str | None = None) -> chain.ChainComplex:
        obj = self.read_json(path if path is not None else self.args.inp, "complex")
        if "complex" in obj:
            obj = obj["complex"]
        elif "boundaries" not in obj and "code" in obj and "source" in obj:
            obj = obj["source"]
        if "boundaries" not in obj:
            raise UsageError("input carries no chain complex")
        return chain.ChainComplex.from_json(obj)

    def code(self) -> codes.CssCode:
        obj = self.read_json(self.args.inp, "code or complex")
        if "code" in obj and "complex" in obj:
            C = chain.ChainComplex.from_json(obj["complex"])
            return codes.extract_code(C, obj["code"]["q_deg"])
        if "complex" in obj or "boundaries" in obj:
            C = chain.ChainComplex.from_json(obj.get("complex", obj))
            return codes.extract_code(C, self.args.degree if self.args.degree is not None else 1)
        if "code" in obj:
            obj = obj["code"]
        if "H_X" not in obj:
            raise UsageError("input carries neither a code nor a complex")
        return codes.CssCode.from_json(obj)

    def graph(self) -> graphs.Graph:
        a = self.args
        if getattr(a, "graph", None):
            return graphs.named_graph(a.graph)
        obj = self.read_json(a.inp, "graph")
        if "graph" in obj:
            obj = obj["graph"]
        if "edges" not in obj:
            raise UsageError("input carries no graph")
        return graphs.Graph.from_json(obj)


def _parse_ints(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# command handlers: each returns (result dict, ok, extra top-level fields)


def cmd_graph_gen(ctx, a):
    if a.name:
        G = graphs.named_graph(a.name)
    elif a.random_regular:
        n, d = a.random_regular
        G = graphs.random_regular(n, d, min_girth=a.min_girth, seed=a.seed)
    else:
        raise UsageError("give --name or --random-regular N D")
    return {"n": G.n, "edges": G.num_edges, "girth": _plain(graphs.girth(G))}, True, {"graph": G.to_json()}


def cmd_graph_girth(ctx, a):
    G = ctx.graph()
    return {"girth": _plain(graphs.girth(G))}, True, {}


def cmd_graph_expansion(ctx, a):
    G = ctx.graph()
    c = graphs.edge_expansion(G, a.mode)
    return {"c": _plain(c), "mode": a.mode}, True, {}


def cmd_complex_build(ctx, a):
    if a.random:
        C = chain.random_complex(_parse_ints(a.random), a.mod, seed=a.seed)
    else:
        G = graphs.named_graph(a.graph) if a.graph else ctx.graph()
        C = chain.power(chain.graph_complex(G, a.mod), a.power)
    return {"q": C.q, "dims": list(C.dims)}, True, {"complex": C.to_json()}


def cmd_complex_product(ctx, a):
    A = ctx.complex(a.inp)
    B = ctx.complex(a.other)
    C = chain.tensor_product(A, B)
    return {"q": C.q, "dims": list(C.dims)}, True, {"complex": C.to_json()}


def cmd_complex_power(ctx, a):
    C = chain.power(ctx.complex(), a.k)
    return {"q": C.q, "dims": list(C.dims)}, True, {"complex": C.to_json()}


def cmd_complex_betti(ctx, a):
    C = ctx.complex()
    if C.q == 0 and a.p is None:
        b = chain.betti_rational(C)
        field = "Q"
    else:
        p = a.p or C.q
        b = chain.betti(C, p)
        field = f"F_{p}"
    return {"betti": b, "field": field, "dims": list(C.dims)}, True, {}


def _labels_from(C, cells_json: str | None, degree: int, count: int, seed: int):
    if cells_json:
        try:
            raw = json.loads(cells_json)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--cells is not valid JSON: {exc}") from None
        return [tuple(tuple(p) for p in lab) if isinstance(lab, list) else C.labels[degree][int(lab)]
                for lab in raw]
    rng = np.random.default_rng(seed)
    idx = rng.permutation(C.dims[degree])[:count]
    return [C.labels[degree][int(i)] for i in idx]


def cmd_complex_delete(ctx, a):
    C = ctx.complex()
    cells = _labels_from(C, a.cells, a.degree, a.count, a.seed)
    D = chain.delete_cells(C, cells)
    res = {"deleted": [[list(p) for p in lab] for lab in cells], "dims_before": list(C.dims),
           "dims_after": list(D.dims)}
    return res, True, {"complex": D.to_json()}


def cmd_complex_mv_check(ctx, a):
    C = ctx.complex()
    cells = _labels_from(C, a.cells, 2, a.count, a.seed)
    rep = chain.deletion_b2_bound_check(C, cells)
    return rep.to_json(), rep.holds, {}


def cmd_code_extract(ctx, a):
    C = ctx.complex()
    code = codes.extract_code(C, a.degree if a.degree is not None else 1)
    res = {"q": code.q, "n": code.n, "checks_X": code.H_X.rows, "checks_Z": code.H_Z.rows}
    extra = {"code": code.to_json(), "complex": C.to_json()}
    if a.alist:
        extra["alist"] = code.to_alist()
    return res, True, extra


def cmd_code_params(ctx, a):
    return codes.code_params(ctx.code()).to_json(), True, {}


def cmd_code_distance(ctx, a):
    code = ctx.code()
    sides = ["X", "Z"] if a.side == "both" else [a.side]
    res = {f"d_{s}": codes.distance_brute(code, s, a.budget) for s in sides}
    if len(sides) == 2:
        res["d"] = min(res.values())
    return res, True, {}


def cmd_code_census(ctx, a):
    return codes.syndrome_census(ctx.code()).to_json(), True, {}


def cmd_code_gap(ctx, a):
    rep = codes.syndrome_gap(ctx.code(), a.mode, seed=a.seed, budget=a.budget)
    return rep.to_json(), True, {}


def cmd_code_entropy_bound(ctx, a):
    if a.Np is None or a.b2 is None:
        rep = codes.syndrome_census(ctx.code())
        N_p, b2 = rep.N_p, rep.b2
    else:
        N_p, b2 = a.Np, a.b2
    eb = codes.entropy_bound(N_p, b2, a.eps)
    return {"N_p": N_p, "b2": b2, "eps": a.eps, **eb.to_json()}, True, {}


def cmd_toric_defect(ctx, a):
    CC = ctx.complex()
    ops = toric.defect_ops(CC, a.plaquette)
    As = toric.product([toric.vertex_operator(CC, s) for s in ops.S], n=CC.dims[1])
    pc = toric.anticommuting_plaquettes(CC, ops.C)
    pd = toric.anticommuting_plaquettes(CC, ops.D)
    res = {"product_matches": ops.C * ops.D == As, "same_pattern": pc == pd,
           "anticommuting": pd, "weight_D": ops.D.weight, "weight_C": ops.C.weight,
           "ops": ops.to_json()}
    return res, bool(res["product_matches"] and res["same_pattern"]), {}


def _chain_from(ctx, a, n: int) -> np.ndarray:
    if a.chain:
        x = np.array(_parse_ints(a.chain), dtype=np.int64)
        if x.shape != (n,):
            raise UsageError(f"--chain needs {n} entries")
        return x
    return np.random.default_rng(a.seed).integers(0, 2, n)


def cmd_toric_wilson(ctx, a):
    CC = ctx.complex()
    if not CC.factors or len(CC.factors) != 2:
        raise UsageError("Wilson vectors need a product of two graphs")
    G = CC.factors[1]
    basis = toric.cycle_basis(G)
    x = _chain_from(ctx, a, CC.dims[1])
    v = toric.wilson_vector(CC, x, a.vertex, basis)
    d = toric.wilson_distance(v, [1] * len(v), G, basis)
    return {"vertex": a.vertex, "vector": v, "distance_to_trivial": d, "b1": len(basis)}, True, {}


def cmd_toric_ratio(ctx, a):
    C = ctx.complex()
    x = _chain_from(ctx, a, C.dims[1])
    rep = toric.coboundary_inverse_ratio(C, x, a.mode, seed=a.seed)
    return {"x": x.tolist(), **rep.to_json()}, True, {}


def cmd_sim_disentangle(ctx, a):
    C = ctx.complex()
    res = stabsim.disentangle_circuit(C, _parse_ints(a.seeds) or [0])
    return res.to_json(), True, {}


def cmd_sim_canon(ctx, a):
    cf = stabsim.canonical_form(ctx.code())
    return cf.to_json(), True, {}


def cmd_sim_expect(ctx, a):
    C = ctx.complex()
    S0 = _parse_ints(a.seeds) or [0]
    res = stabsim.disentangle_circuit(C, S0)
    g = stabsim.ground_stabilizers(C, S0, res)
    eA = [stabsim.expectation(g, P) for P in toric.all_vertex_operators(C)]
    eB = [stabsim.expectation(g, P) for P in toric.all_plaquette_operators(C)]
    out = {"A": eA, "B": eB, "energy": -sum(eA) - sum(eB), "seed_set": res.seed_set}
    if a.dense:
        psi = res.circuit.apply_inverse(stabsim.zero_state(C.dims[1]))
        dense = [stabsim.dense_expectation(psi, P).real
                 for P in toric.all_vertex_operators(C) + toric.all_plaquette_operators(C)]
        out["dense_agrees"] = bool(np.allclose(dense, eA + eB, atol=1e-9))
        return out, out["dense_agrees"], {}
    return out, True, {}


def cmd_stat_ising_verify(ctx, a):
    G = ctx.graph()
    rep = statmech.verify_m2_bound(G, a.mode, seed=a.seed, samples=a.samples)
    return rep.to_json(), rep.violations == 0, {}


def cmd_stat_checkerboard(ctx, a):
    rep = statmech.checkerboard_state(a.L, a.l, samples=a.samples, seed=a.seed)
    ok = rep.agrees(5.0) if a.samples else True
    return rep.to_json(), ok, {}


def cmd_stat_thermal(ctx, a):
    betas = _parse_floats(a.betas)
    rows = []
    code = ctx.code() if (a.inp or not sys.stdin.isatty()) and not a.per_term_only else None
    for b in betas:
        if code is None:
            v = statmech.ThermalTermSpectrum(a.q).term_value(b)
            rows.append({"beta": b, "per_term": v})
            continue
        r = statmech.thermal_energy_exact(code, b, drop_redundant=a.drop_redundant)
        row = {"beta": b, "energy": r.energy, "per_term": r.per_term, "n_terms": r.n_terms}
        if a.brute:
            row["brute"] = statmech.thermal_energy_brute(code, b)
        rows.append(row)
    ok = all(abs(r["energy"] - r["brute"]) <= 1e-9 for r in rows if "brute" in r)
    return {"rows": rows}, ok, {}


def cmd_verify_all(ctx, a):
    only = _parse_ints(a.only) or None
    results = acceptance.run_all(only)
    for r in results:
        print(r.line, file=sys.stderr)
    return {"criteria": [r.to_json() for r in results], "size": a.size}, all(r.passed for r in results), {}


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, inp: bool = True):
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here (atomically) instead of stdout")
    if inp:
        p.add_argument("--in", dest="inp", help="input JSON file (default: stdin)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaincodes", description="Chain complexes, codes and checks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    top = parser.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, inp=True, **kw):
        p = group.add_parser(name, **kw)
        _common(p, inp)
        p.set_defaults(func=fn)
        return p

    g = top.add_parser("graph").add_subparsers(dest="cmd", required=True)
    p = sub(g, "gen", cmd_graph_gen, inp=False)
    p.add_argument("--name")
    p.add_argument("--random-regular", nargs=2, type=int, metavar=("N", "D"))
    p.add_argument("--min-girth", type=int, default=3)
    for name, fn in (("girth", cmd_graph_girth), ("expansion", cmd_graph_expansion)):
        p = sub(g, name, fn)
        p.add_argument("--graph", help="named graph instead of input JSON")
    p.add_argument("--mode", choices=("exact", "spectral"), default="exact")

    c = top.add_parser("complex").add_subparsers(dest="cmd", required=True)
    p = sub(c, "build", cmd_complex_build)
    p.add_argument("--graph")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--mod", type=int, default=2)
    p.add_argument("--random", help="dims D0,D1,D2 of a random redundancy-free complex")
    p = sub(c, "product", cmd_complex_product)
    p.add_argument("--other", required=True, help="second factor JSON")
    p = sub(c, "power", cmd_complex_power)
    p.add_argument("--k", type=int, required=True)
    p = sub(c, "betti", cmd_complex_betti)
    p.add_argument("--p", type=int, help="field characteristic (default: the ring modulus)")
    for name, fn in (("delete", cmd_complex_delete), ("mv-check", cmd_complex_mv_check)):
        p = sub(c, name, fn)
        p.add_argument("--cells", help="JSON list of labels or positions")
        p.add_argument("--count", type=int, default=1, help="random cells to delete when --cells is absent")
    p.add_argument("--degree", type=int, default=2, help=argparse.SUPPRESS)
    c.choices["delete"].add_argument("--degree", type=int, default=0)

    k = top.add_parser("code").add_subparsers(dest="cmd", required=True)
    for name, fn in (("extract", cmd_code_extract), ("params", cmd_code_params),
                     ("distance", cmd_code_distance), ("census", cmd_code_census),
                     ("gap", cmd_code_gap), ("entropy-bound", cmd_code_entropy_bound)):
        p = sub(k, name, fn)
        p.add_argument("--degree", type=int, help="cell degree carrying the qudits (default 1)")
        p.add_argument("--budget", type=int, default=codes.DEFAULT_BUDGET)
    k.choices["extract"].add_argument("--alist", action="store_true")
    k.choices["distance"].add_argument("--side", choices=("X", "Z", "both"), default="both")
    k.choices["gap"].add_argument("--mode", choices=("exact", "search"), default="exact")
    p = k.choices["entropy-bound"]
    p.add_argument("--Np", type=int)
    p.add_argument("--b2", type=int)
    p.add_argument("--eps", type=float, required=True)

    t = top.add_parser("toric").add_subparsers(dest="cmd", required=True)
    p = sub(t, "defect", cmd_toric_defect)
    p.add_argument("--plaquette", type=int, default=0)
    p = sub(t, "wilson", cmd_toric_wilson)
    p.add_argument("--vertex", type=int, default=0)
    p.add_argument("--chain", help="comma-separated 1-chain (default: random from --seed)")
    p = sub(t, "ratio", cmd_toric_ratio)
    p.add_argument("--mode", choices=("exact", "anneal"), default="exact")
    p.add_argument("--chain", help="comma-separated 1-chain (default: random from --seed)")

    s = top.add_parser("sim").add_subparsers(dest="cmd", required=True)
    p = sub(s, "disentangle", cmd_sim_disentangle)
    p.add_argument("--seeds", default="0", help="seed 0-cells, comma-separated")
    p = sub(s, "canon", cmd_sim_canon)
    p.add_argument("--degree", type=int)
    p = sub(s, "expect", cmd_sim_expect)
    p.add_argument("--seeds", default="0")
    p.add_argument("--dense", action="store_true", help="cross-check with a statevector")

    m = top.add_parser("stat").add_subparsers(dest="cmd", required=True)
    p = sub(m, "ising-verify", cmd_stat_ising_verify)
    p.add_argument("--graph")
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--samples", type=int, default=100_000)
    p = sub(m, "checkerboard", cmd_stat_checkerboard, inp=False)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--samples", type=int, default=0)
    p = sub(m, "thermal", cmd_stat_thermal)
    p.add_argument("--betas", default="0,0.5,1,2,5")
    p.add_argument("--q", type=int, default=2, help="modulus for --per-term-only")
    p.add_argument("--per-term-only", action="store_true")
    p.add_argument("--degree", type=int)
    p.add_argument("--drop-redundant", action="store_true")
    p.add_argument("--brute", action="store_true", help="also compute the dense trace")

    v = top.add_parser("verify").add_subparsers(dest="cmd", required=True)
    p = sub(v, "all", cmd_verify_all, inp=False)
    p.add_argument("--size", choices=("desk",), default="desk")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


# ---------------------------------------------------------------------------
# output


def _params(args) -> dict:
    skip = {"func", "out", "format", "verbose"}
    return _plain({k: v for k, v in vars(args).items() if k not in skip})


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, json.dumps(obj) if isinstance(obj, list) else obj))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True) + "\n"
    result = report["result"]
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        rows = result.get("rows")
        if isinstance(rows, list) and rows and all(isinstance(r, dict) for r in rows):
            keys = list(dict.fromkeys(k for r in rows for k in r))
            w.writerow(keys)
            for r in rows:
                w.writerow([r.get(k, "") for k in keys])
        else:
            w.writerow(["key", "value"])
            pairs: list = []
            _flatten("", result, pairs)
            w.writerows(pairs)
        return buf.getvalue()
    pairs = []
    _flatten("", result, pairs)
    lines = [f"{k}: {v}" for k, v in pairs]
    lines.append(f"ok: {report['ok']}")
    return "\n".join(lines) + "\n"


def _write(text: str, path: str | None):
    if not path:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".chaincodes-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    ctx = Context(args)
    t0 = time.perf_counter()
    try:
        result, ok, extra = args.func(ctx, args)
    except (UsageError, ValueError, KeyError, IndexError) as exc:
        print(f"chaincodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except (ArithmeticError, codes.BudgetExceeded) as exc:
        print(f"chaincodes: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK, None
    elapsed = time.perf_counter() - t0
    command = f"{args.group} {args.cmd}"
    manifest = {"command": command, "params": _params(args), "seed": args.seed,
                "inputs": ctx.inputs, "version": _version(), "timings": {"seconds": round(elapsed, 6)}}
    report = {"manifest": manifest, "ok": bool(ok), "result": _plain(result), **_plain(extra)}
    # the digest covers everything except wall-clock timings
    scoped = dict(report, manifest={k: v for k, v in manifest.items() if k != "timings"})
    report["digest"] = _digest(scoped)
    validate(report, "report")
    _write(render(report, args.format), args.out)
    return (EXIT_OK if ok else EXIT_CHECK), report


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
