"""Command line runner.

    nodalsurplus graph check --graph g.json
    nodalsurplus gen --graph g.json --seed 7 --output h.json
    nodalsurplus gsc --graph g.json --matrix h.json
    nodalsurplus surplus --graph g.json --seed 7 --k all
    nodalsurplus verify binomial --graph g.json --seed 7 --k all
    nodalsurplus scan --graph g.json --seed 7 --eps 0 --cycle 0 --k 3 --samples 64
    nodalsurplus flatband-demo

Exit status: 0 when every verdict passes, 1 when a verdict fails or is
INDETERMINATE, 2 on bad input or usage (one line on stderr).
Without ``--matrix`` the matrix is ``random_gsc_instance(graph, seed)``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import InputError, NumericalError, RetriesExhausted
from .graph import Graph, analyze_cycles, bridge_sides, bridges, build_graph
from .instances import GeneratorConfig, SplitMix64, canonical_instance, flat_band_instance, random_gsc_instance
from .lattice import binomial_verdict, lattice_map, morse_report, popcount
from .local_global import build_certificate, haynsworth_check, schur_check, weyl_localglobal_check
from .magnetic import (
    CURRENT_TOL, FLAT_BAND, STRICTLY_DECREASING, STRICTLY_INCREASING,
    current_scale, edge_scans, j_minus, partial_criticality_check, probability_current,
)
from .matrix_space import SupportedMatrix, gauge_transform, signing, signing_orbits, torus_action
from .nodal import PASS, FAIL, INDETERMINATE, check_distinct_signings, check_gsc, surplus_distribution, symmetry_spectra
from .spectra import eig_herm

THREADS_ENV = "NODALSURPLUS_THREADS"
DERIV_FLOOR = 1e-10
GAUGE_TOL = 1e-12
FLAT_EIG_TOL = 1e-9


class UsageError(InputError):
    pass


# ---------------------------------------------------------------- output

def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits (non-finite -> null)."""
    obj = _plain(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    return json.dumps(obj)


def _write(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- input

def load_graph(path: str) -> Graph:
    """Strict reader for ``{"n": int, "edges": [[r, s], ...]}`` with ``r < s``."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as exc:
        raise InputError(f"cannot read graph file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"graph file {path} is not JSON: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) != {"n", "edges"}:
        raise InputError("graph file must be an object with exactly the keys 'n' and 'edges'")
    n, edges = data["n"], data["edges"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("'n' must be an integer")
    if not isinstance(edges, list):
        raise InputError("'edges' must be a list")
    for e in edges:
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise InputError(f"edge {e!r} is not a pair of integers")
        if not e[0] < e[1]:
            raise InputError(f"edge {e!r} must be written with r < s")
    return build_graph(n, [tuple(e) for e in edges])


def load_matrix(args, g: Graph) -> SupportedMatrix:
    if args.matrix:
        try:
            with open(args.matrix) as f:
                data = json.load(f)
        except OSError as exc:
            raise InputError(f"cannot read matrix file {args.matrix}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"matrix file {args.matrix} is not JSON: {exc.msg}") from None
        if not isinstance(data, dict):
            raise InputError("matrix file must be a JSON object")
        return SupportedMatrix.from_json(g, data)
    return random_gsc_instance(g, GeneratorConfig(seed=args.seed))


def k_values(spec: str, n: int) -> list[int]:
    if spec == "all":
        return list(range(1, n + 1))
    try:
        k = int(spec)
    except ValueError:
        raise UsageError(f"--k must be an integer or 'all', got {spec!r}") from None
    if not 1 <= k <= n:
        raise UsageError(f"--k {k} outside [1, {n}]")
    return [k]


def _threads(args) -> int:
    if args.threads is not None:
        t = args.threads
    else:
        try:
            t = int(os.environ.get(THREADS_ENV, "1"))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer") from None
    if t < 1:
        raise UsageError("thread count must be at least 1")
    return t


def _map(args, fn, items):
    """Order-preserving map, optionally on a thread pool."""
    items = list(items)
    t = _threads(args)
    if t == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=t) as pool:
        return list(pool.map(fn, items))


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def _combine(verdicts) -> str:
    verdicts = list(verdicts)
    if any(v == FAIL for v in verdicts):
        return FAIL
    if any(v == INDETERMINATE for v in verdicts):
        return INDETERMINATE
    return PASS


# ---------------------------------------------------------------- commands

def cmd_graph_check(args) -> int:
    g = load_graph(args.graph)
    cs = analyze_cycles(g)
    _write(args, dumps({
        "n": g.n,
        "edges": g.edges,
        "beta": cs.beta,
        "disjoint_cycles": cs.disjoint,
        "bridges": bridges(g),
        "tree_edges": cs.tree_edges,
        "representative_edges": cs.representative_edges,
        "fundamental_cycles": cs.fundamental_cycles,
    }))
    return 0


def cmd_gen(args) -> int:
    g = load_graph(args.graph)
    if args.canonical is not None:
        h = canonical_instance(g, args.canonical, args.seed)
    else:
        h = random_gsc_instance(g, GeneratorConfig(seed=args.seed))
    _write(args, dumps(h.to_json()))
    return 0


def cmd_gsc(args) -> int:
    g = load_graph(args.graph)
    h = load_matrix(args, g)
    cs = analyze_cycles(g)
    gsc = check_gsc(h, cs=cs)
    out = {"statement": "generic spectral condition", **gsc.to_json()}
    dist = None
    if gsc.passed:
        dist = check_distinct_signings(h, cs=cs)
        out["distinct"] = {"statement": "lambda_k separates gauge classes of signings", **dist.to_json()}
    _write(args, dumps(out))
    return 0 if gsc.passed and dist.passed else 1


def _gate(args, g: Graph):
    cs = analyze_cycles(g)
    if not cs.disjoint and not args.exploratory:
        raise InputError("graph has intersecting cycles; the disjoint-cycle hypothesis fails "
                         "(use --exploratory to report without asserting)")
    return cs


def _report_only(args, cs) -> bool:
    return args.exploratory and not cs.disjoint


def cmd_surplus(args) -> int:
    g = load_graph(args.graph)
    h = load_matrix(args, g)
    cs = analyze_cycles(g)
    orbit = signing_orbits(g, cs).orbit_size
    spectra = symmetry_spectra(h, cs)
    ks = k_values(args.k, g.n)
    dists = _map(args, lambda k: surplus_distribution(h, k, cs, spectra, orbit), ks)
    results = [d.to_json(binomial_verdict(d)) for d in dists]
    _write(args, dumps({"disjoint_cycles": cs.disjoint, "orbit_size": orbit, "results": results}))
    if not cs.disjoint:
        return 0
    return 0 if all(r["binomial_pass"] for r in results) else 1


def _verify_binomial(args, h, cs, spectra, ks):
    orbit = signing_orbits(h.graph, cs).orbit_size

    def one(k):
        d = surplus_distribution(h, k, cs, spectra, orbit)
        lat = lattice_map(h, k, cs, spectra)
        ok = binomial_verdict(d)
        return {
            **d.to_json(ok),
            "bijective": lat.bijective,
            "verdict": _verdict(ok and lat.bijective),
        }

    results = _map(args, one, ks)
    return "binomial surplus law and Boolean lattice bijection", results


def _verify_morse(args, h, cs, spectra, ks):
    def one(k):
        recs = morse_report(h, k, cs, spectra)
        return {"k": k, "records": [r.to_json() for r in recs],
                "verdict": _verdict(all(r.consistent for r in recs))}

    return "Morse index at symmetry points equals |J_-| and the nodal surplus", _map(args, one, ks)


def _verify_monotone(args, h, cs, spectra, ks):
    samples = args.samples or 64
    tasks = [(eps, j) for eps in range(1 << cs.beta) for j in range(cs.beta)]
    scans = _map(args, lambda t: edge_scans(h, t[0], t[1], samples, cs), tasks)
    results = []
    for (eps, j), per_k in zip(tasks, scans):
        for k in ks:
            sc = per_k[k - 1]
            d = sc.derivative_samples
            sign_ok = bool(np.all(d > DERIV_FLOOR) or np.all(d < -DERIV_FLOOR))
            direction_ok = (sc.verdict == STRICTLY_INCREASING and bool(np.all(d > 0))) or \
                           (sc.verdict == STRICTLY_DECREASING and bool(np.all(d < 0)))
            results.append({
                "eps": eps, "cycle": j, "k": k, "scan": sc.verdict,
                "min_abs_derivative": float(np.abs(d).min()),
                "verdict": _verdict(sign_ok and direction_ok),
            })
    return "eigenvalues are strictly monotone along cube edges", results


def _subsets(h, cs, spectra, k, eps):
    full = (1 << cs.beta) - 1
    jm = j_minus(h, eps, k, cs, spectra)
    return [("J_minus", jm), ("J_plus", full ^ jm)]


def _local_tasks(cs, ks):
    return [(eps, k) for eps in range(1 << cs.beta) for k in ks]


def _verify_localglobal(args, h, cs, spectra, ks):
    grid = args.grid or 32
    cache: dict = {}

    def one(task):
        eps, k = task
        rows = []
        for label, J in _subsets(h, cs, spectra, k, eps):
            if popcount(J) > 3:
                rows.append({"eps": eps, "k": k, "J": label, "verdict": INDETERMINATE,
                             "reason": "subset larger than the grid limit 3"})
                continue
            checks = weyl_localglobal_check(h, eps, k, J, grid, cs, spectra, cache)
            rows.append({"eps": eps, "k": k, "J": label, "mask": J,
                         "checks": [c.to_json() for c in checks],
                         "verdict": _combine(c.verdict for c in checks)})
        return rows

    # the grid cache is shared, so evaluate sequentially
    rows = [r for task in _local_tasks(cs, ks) for r in one(task)]
    return "local minima and maxima on the subtori T_J are global", rows


def _certificate_rows(args, h, cs, spectra, ks, check):
    def one(task):
        eps, k = task
        hs = signing(h, eps, cs)
        rows = []
        for label, J in _subsets(h, cs, spectra, k, eps):
            cert = build_certificate(hs, k, J, cs)
            checks = check(cert, hs)
            inv = [name for name, v in cert.invariants.items() if not v["pass"]]
            verdict = _combine([c.verdict for c in checks] + [FAIL if inv else PASS])
            rows.append({"eps": eps, "k": k, "J": label, "mask": J, "m": cert.m_count,
                         "checks": [c.to_json() for c in checks], "failed_invariants": inv,
                         "verdict": verdict})
        return rows

    return [r for rows in _map(args, one, _local_tasks(cs, ks)) for r in rows]


def _verify_schur(args, h, cs, spectra, ks):
    rows = _certificate_rows(args, h, cs, spectra, ks, lambda c, hs: schur_check(c, hs, cs))
    return "Schur complement of h - lambda is half the Hessian", rows


def _verify_haynsworth(args, h, cs, spectra, ks):
    rows = _certificate_rows(args, h, cs, spectra, ks, lambda c, hs: haynsworth_check(c))
    return "Haynsworth inertia additivity for the block matrix M", rows


def _verify_current(args, h, cs, spectra, ks):
    samples = args.samples or 32
    rng = SplitMix64(args.seed)
    scale = current_scale(h)
    tol = CURRENT_TOL * scale
    bl = bridges(h.graph)
    cycle_vertices = [set(c) for c in cs.fundamental_cycles]
    rows = []
    for i in range(samples):
        k = ks[i % len(ks)]
        alpha = np.array([rng.uniform(0.0, 2 * np.pi) for _ in range(cs.beta)])
        if bl:
            b = bl[int(rng.uniform() * len(bl))]
            side = bridge_sides(h.graph, b)[int(rng.uniform() < 0.5)]
            for j in range(cs.beta):
                if cycle_vertices[j] <= side:
                    alpha[j] = 0.0
        theta = np.array([rng.uniform(0.0, 2 * np.pi) for _ in range(h.n)])
        hmat = torus_action(h, alpha, cs)
        es = eig_herm(hmat)
        phi = es.vector(k)
        cur = probability_current(hmat, phi, h.graph)
        diag = cur.diagnostics(cs)
        moved = probability_current(gauge_transform(hmat, theta), np.exp(1j * theta) * phi, h.graph)
        gauge = float(np.abs(moved.values - cur.values).max(initial=0.0))
        partial = partial_criticality_check(h, alpha, k, cs)
        ok = (diag["max_divergence"] <= tol and diag["max_bridge"] <= tol
              and diag["max_cycle_spread"] <= tol and gauge <= GAUGE_TOL and partial.passed)
        rows.append({"sample": i, "k": k, "alpha": alpha, **diag, "gauge_deviation": gauge,
                     "far_side_current": partial.max_current, "verdict": _verdict(ok)})
    return "probability current is divergence free, vanishes on bridges and real blocks", rows


VERIFIERS = {
    "binomial": _verify_binomial,
    "morse": _verify_morse,
    "monotone": _verify_monotone,
    "localglobal": _verify_localglobal,
    "schur": _verify_schur,
    "haynsworth": _verify_haynsworth,
    "current": _verify_current,
}


def cmd_verify(args) -> int:
    g = load_graph(args.graph)
    cs = _gate(args, g)
    h = load_matrix(args, g)
    ks = k_values(args.k, g.n)
    spectra = symmetry_spectra(h, cs)
    statement, rows = VERIFIERS[args.what](args, h, cs, spectra, ks)
    verdict = _combine(r["verdict"] for r in rows)
    report_only = _report_only(args, cs)
    _write(args, dumps({
        "statement": statement,
        "asserted": not report_only,
        "verdict": verdict,
        "pass": verdict == PASS,
        "results": rows,
    }))
    if report_only:
        return 0
    return 0 if verdict == PASS else 1


def cmd_scan(args) -> int:
    g = load_graph(args.graph)
    h = load_matrix(args, g)
    cs = analyze_cycles(g)
    ks = k_values(args.k, g.n)
    if len(ks) != 1:
        raise UsageError("scan needs a single --k")
    if not 0 <= args.eps < (1 << cs.beta):
        raise UsageError(f"--eps {args.eps} is not a symmetry point bitmask for beta={cs.beta}")
    samples = args.samples or 64
    sc = edge_scans(h, args.eps, args.cycle, samples, cs)[ks[0] - 1]
    d = sc.derivative_samples
    monotone = sc.verdict in (STRICTLY_INCREASING, STRICTLY_DECREASING)
    trailer = {
        "statement": "eigenvalues are strictly monotone along cube edges",
        "eps": args.eps, "cycle": args.cycle, "k": ks[0], "samples": samples,
        "scan": sc.verdict,
        "derivative_sign_constant": bool(np.all(d > DERIV_FLOOR) or np.all(d < -DERIV_FLOOR)),
        "verdict": _verdict(monotone),
    }
    _write(args, sc.to_csv() + "# " + dumps(trailer, indent=0).replace("\n", "") + "\n")
    return 0 if monotone else 1


def cmd_flatband(args) -> int:
    fb = flat_band_instance()
    h = fb.h
    cs = analyze_cycles(h.graph)
    ts = np.linspace(0.0, np.pi, 18)[1:-1]
    dist = []
    for t in ts:
        vals = eig_herm(torus_action(h, [t], cs)).values
        dist.append(float(np.abs(vals - fb.lam).min()))
    sc = edge_scans(h, 0, fb.cycle, args.samples or 64, cs)[fb.k - 1]
    gsc = check_gsc(h, cs=cs)
    persists = max(dist) <= FLAT_EIG_TOL
    ok = persists and sc.verdict == FLAT_BAND and not gsc.passed
    _write(args, dumps({
        "statement": "an eigenvector vanishing on a cycle vertex of degree three gives a flat band",
        "matrix": h.to_json(),
        "lambda": fb.lam,
        "k": fb.k,
        "phi": fb.phi,
        "t": ts,
        "distance_to_lambda": dist,
        "scan": sc.verdict,
        "gsc": gsc.verdict,
        "gsc_reason": gsc.reason,
        "verdict": _verdict(ok),
    }))
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, matrix=True):
    p.add_argument("--graph", required=True, help="graph JSON file")
    if matrix:
        p.add_argument("--matrix", help="matrix JSON file (default: random_gsc_instance from --seed)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nodalsurplus", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    graph = sub.add_parser("graph", help="graph utilities")
    gsub = graph.add_subparsers(dest="graph_command", parser_class=_Parser)
    gsub.required = True
    gc = gsub.add_parser("check", help="cycle structure, bridges, disjointness")
    _common(gc, matrix=False)
    gc.set_defaults(func=cmd_graph_check)

    gen = sub.add_parser("gen", help="write a generated matrix")
    _common(gen, matrix=False)
    gen.add_argument("--canonical", type=float, metavar="XI",
                     help="diag(1..n) plus edge entries of size XI instead of a random GSC draw")
    gen.set_defaults(func=cmd_gen)

    gsc = sub.add_parser("gsc", help="generic spectral condition and distinctness")
    _common(gsc)
    gsc.set_defaults(func=cmd_gsc)

    sur = sub.add_parser("surplus", help="surplus histogram over symmetry points")
    _common(sur)
    sur.add_argument("--k", default="all")
    sur.set_defaults(func=cmd_surplus)

    ver = sub.add_parser("verify", help="check one statement on an instance")
    ver.add_argument("what", choices=sorted(VERIFIERS))
    _common(ver)
    ver.add_argument("--k", default="all")
    ver.add_argument("--grid", type=int, default=None, help="grid points per dimension (localglobal)")
    ver.add_argument("--samples", type=int, default=None, help="scan samples or current samples")
    ver.add_argument("--exploratory", action="store_true",
                     help="run on graphs with intersecting cycles and report without asserting")
    ver.set_defaults(func=cmd_verify)

    scan = sub.add_parser("scan", help="lambda_k along one cube edge as CSV")
    _common(scan)
    scan.add_argument("--eps", type=int, default=0, help="symmetry point bitmask")
    scan.add_argument("--cycle", type=int, default=0)
    scan.add_argument("--k", default="1")
    scan.add_argument("--samples", type=int, default=None)
    scan.set_defaults(func=cmd_scan)

    fb = sub.add_parser("flatband-demo", help="the flat band example")
    fb.add_argument("--samples", type=int, default=None)
    fb.add_argument("--output")
    fb.set_defaults(func=cmd_flatband)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"INDETERMINATE: {exc}", file=sys.stderr)
        return 1
    except RetriesExhausted as exc:
        print(f"FAIL: {exc}; best margins {exc.best}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
