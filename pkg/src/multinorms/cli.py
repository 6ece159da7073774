"""Command-line front end: norms, checks, amenability scans, module proofs.

Every numeric result is emitted as JSON with its certificate, method tag,
and gap; reports are byte-stable for a fixed seed.  Exit codes: 0 success,
1 a checked inequality failed beyond tolerance, 2 input or guard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._optim import DEFAULT_CONFIG, OptConfig, rng_for
from .amenability import (compactness_obstruction, folner_ratio, folner_search,
                          freegroup_obstruction, invariance_constant,
                          pseudo_amenability_scan)
from .groups import (FiniteSupportVector, FreeGroup, GroupModel, LatticeGroup,
                     ball, delta, group_from_spec, reduce_word, uniform_on)
from .gmodules import (ModuleMatrix, Pi, PiTilde, Q_map, retraction_from_mean,
                       verify_module_identities)
from .multinorm import (Decomposition, DualMultinormEngine, DualTuple,
                        MaxMultinormEngine, NormResult, Partition,
                        PartitionSupQEngine, StandardPQEngine, WeakPQEngine,
                        axioms_check, dual_multinorm_upper, duality_check,
                        max_multinorm, ordering_check, partition_sup_q,
                        standard_pq, weak_pq)
from .operators import LinOp, mb_norm
from .spaces import (DiscreteSpace, Exponent, MultiVector, lp_norm_values,
                     multivector_from_json, parse_exponent)
from .weaksum import mu

__all__ = ["main", "RunConfig"]


@dataclass
class RunConfig:
    """Reproducibility controls; a fixed seed gives byte-identical reports."""

    seed: int = 0
    guard_bits: float = 24.0
    tol: float = 1e-9
    out: Optional[str] = None
    fmt: str = "json"

    def opt(self) -> OptConfig:
        from dataclasses import replace

        return replace(DEFAULT_CONFIG, seed=self.seed,
                       partition_guard_bits=self.guard_bits)


class InputError(ValueError):
    pass


def _read_doc(path: Optional[str]) -> dict:
    try:
        if path in (None, "-"):
            return json.loads(sys.stdin.read())
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input document: {exc}") from exc


def _emit(run: RunConfig, payload, text_summary: Optional[str] = None) -> None:
    if run.fmt == "text" and text_summary is not None:
        body = text_summary
    elif run.fmt == "csv" and isinstance(payload, dict) and "rows" in payload:
        body = _rows_to_csv(payload["rows"])
    else:
        body = json.dumps(payload, sort_keys=True, indent=2,
                          separators=(",", ": "))
    if run.out:
        with open(run.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(body + "\n")
    else:
        sys.stdout.write(body + "\n")


def _rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue().rstrip("\n")


def _witness_json(cert) -> Optional[dict]:
    if cert is None:
        return None
    if isinstance(cert, Partition):
        return {"kind": "partition", "assignment": list(cert.assignment)}
    if isinstance(cert, DualTuple):
        return {"kind": "dual_tuple", "lambdas": cert.lambdas.tolist(),
                "feasibility": cert.feasibility}
    if isinstance(cert, Decomposition):
        return {"kind": "decomposition",
                "terms": [{"alpha": np.asarray(a).tolist(),
                           "y": np.asarray(y).tolist()} for a, y in cert.terms]}
    return {"kind": type(cert).__name__}


def _norm_result_json(res: NormResult) -> dict:
    return {"value": res.value, "upper_bound": res.upper_bound, "gap": res.gap,
            "method": res.method, "certificate": _witness_json(res.certificate)}


def _parse_elements(G: GroupModel, items) -> list:
    out = []
    for item in items:
        if isinstance(G, FreeGroup):
            out.append(reduce_word(tuple(int(v) for v in item)))
        elif isinstance(G, LatticeGroup):
            if isinstance(item, (int, float)):
                item = [item]
            out.append(tuple(int(v) for v in item))
        else:
            out.append(int(item))
    return out


def _parse_mean(G: GroupModel, spec) -> FiniteSupportVector:
    if isinstance(spec, str):
        spec = json.loads(spec) if spec.strip().startswith("{") else {"kind": spec}
    kind = spec.get("kind", "uniform")
    if kind == "delta":
        return delta(G, G.identity)
    if kind == "uniform":
        return uniform_on(G, ball(G, int(spec.get("radius", 1))))
    if kind == "interval":
        if not isinstance(G, LatticeGroup) or G.dim != 1:
            raise InputError("interval means need the group Z")
        m = int(spec.get("m", 1))
        return uniform_on(G, [(k,) for k in range(m)])
    if kind == "explicit":
        support = _parse_elements(G, spec["support"])
        values = [float(v) for v in spec["values"]]
        return FiniteSupportVector(G, dict(zip(support, values)))
    raise InputError(f"unknown mean spec {spec!r}")


def _engine_for(name: str, args, cfg: OptConfig):
    if name == "weak":
        return WeakPQEngine(args.p, args.q, args.r, cfg=cfg), "multi"
    if name == "standard":
        return StandardPQEngine(args.p, args.q, cfg=cfg), "multi"
    if name == "max":
        return MaxMultinormEngine(), "multi"
    if name == "partition":
        return PartitionSupQEngine(args.q, cfg=cfg), "multi"
    if name == "dual":
        return DualMultinormEngine(args.r, args.p, args.s, cfg=cfg), "dual_multi"
    raise InputError(f"unknown engine {name!r}")


# --------------------------------------------------------------------------
# subcommands


def _cmd_norm(args, run: RunConfig) -> int:
    cfg = run.opt()
    x = multivector_from_json(_read_doc(args.input))
    kind = args.kind
    if kind == "weak":
        res = weak_pq(x, args.p, args.q, args.r, mode=args.mode, cfg=cfg)
    elif kind == "standard":
        res = standard_pq(x, args.p, args.q, mode=args.mode, cfg=cfg)
    elif kind == "max":
        res = max_multinorm(x)
    elif kind == "partition":
        res = partition_sup_q(x, args.q, mode=args.mode, cfg=cfg)
    elif kind == "dual":
        res = dual_multinorm_upper(x, args.r, args.p, args.s, cfg=cfg)
    else:
        raise InputError(f"unknown norm kind {kind!r}")
    payload = {"kind": kind, "p": str(parse_exponent(args.p)),
               "q": str(parse_exponent(args.q)), "seed": run.seed}
    payload.update(_norm_result_json(res))
    _emit(run, payload, text_summary=f"{kind}: {res.value} (gap {res.gap})")
    return 0


def _cmd_mu(args, run: RunConfig) -> int:
    cfg = run.opt()
    x = multivector_from_json(_read_doc(args.input))
    res = mu(args.p, x, args.r, cfg)
    payload = {"p": str(parse_exponent(args.p)), "r": str(parse_exponent(args.r)),
               "value": res.value, "upper_bound": res.upper_bound,
               "gap": res.gap, "method": res.method,
               "witness": res.witness.tolist(), "seed": run.seed}
    _emit(run, payload, text_summary=f"mu: {res.value} (gap {res.gap})")
    return 0


def _cmd_mbnorm(args, run: RunConfig) -> int:
    cfg = run.opt()
    doc = _read_doc(args.input)
    matrix = np.asarray(doc["matrix"], dtype=float)
    r = parse_exponent(doc.get("r", 2))
    t = parse_exponent(doc.get("t", 2))
    dom = DiscreteSpace(tuple(range(matrix.shape[1])),
                        np.asarray(doc.get("weights_domain",
                                           np.ones(matrix.shape[1])), dtype=float))
    cod = DiscreteSpace(tuple(range(matrix.shape[0])),
                        np.asarray(doc.get("weights_codomain",
                                           np.ones(matrix.shape[0])), dtype=float))
    T = LinOp.create(matrix, dom, r, cod, t)
    dom_engine = WeakPQEngine(args.p, args.q, r, cfg=cfg)
    cod_engine = WeakPQEngine(args.p, args.q, t, cfg=cfg)
    report = mb_norm(T, args.kmax, dom_engine, cod_engine, cfg=cfg)
    payload = report.as_dict()
    payload["seed"] = run.seed
    _emit(run, payload, text_summary=f"mb norm: {report.result.value}")
    return 0 if (not report.contract_checked or report.contract_ok) else 1


def _random_tuples(space_size: int, n_max: int, trials: int, cfg: OptConfig):
    rng = rng_for(cfg, 1414, space_size, trials)
    space = DiscreteSpace(tuple(range(space_size)), np.ones(space_size))
    out = []
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        out.append(MultiVector(space, rng.standard_normal((n, space_size))))
    return space, out


def _cmd_check(args, run: RunConfig) -> int:
    cfg = run.opt()
    if args.what == "axioms":
        engine, kind = _engine_for(args.engine, args, cfg)
        space = DiscreteSpace(tuple(range(args.m)), np.ones(args.m))
        report = axioms_check(engine, space, n_max=args.n_max,
                              trials=args.trials, kind=kind, cfg=cfg,
                              tol=run.tol)
        payload = report.as_dict()
        payload["seed"] = run.seed
        _emit(run, payload, text_summary=f"axioms[{report.engine}]: ok={report.ok}")
        return 0 if report.ok else 1
    if args.what == "ordering":
        space, xs = _random_tuples(args.m, args.n_max, args.trials, cfg)
        report = ordering_check(xs, (args.p1, args.q1), (args.p2, args.q2),
                                r=args.r, cfg=cfg, tol=run.tol)
        report["seed"] = run.seed
        _emit(run, report, text_summary=f"ordering: ok={report['ok']}")
        return 0 if report["ok"] else 1
    if args.what == "duality":
        space, lams = _random_tuples(args.m, args.n_max, args.trials, cfg)
        report = duality_check(lams, args.p, args.q, r=args.r, cfg=cfg,
                               tol=max(run.tol, 1e-6))
        report["seed"] = run.seed
        _emit(run, report,
              text_summary=f"duality: ok={report['ok']} gap={report['max_rel_gap']}")
        return 0 if report["ok"] else 1
    raise InputError(f"unknown check {args.what!r}")


def _cmd_folner(args, run: RunConfig) -> int:
    G = group_from_spec(args.group)
    F = _parse_elements(G, json.loads(args.f))
    if args.s:
        S = _parse_elements(G, json.loads(args.s))
        rep = folner_ratio(G, F, S)
    else:
        rep = folner_search(G, F, family=args.family, max_radius=args.max_radius,
                            max_size=args.max_size, radius=args.radius,
                            max_side=args.max_side, cfg=run.opt())
    payload = rep.as_dict()
    payload["seed"] = run.seed
    payload["F"] = [repr(e) for e in rep.F]
    payload["S"] = [repr(e) for e in rep.S]
    _emit(run, payload, text_summary=f"ratio: {rep.ratio}")
    return 0


def _cmd_amen(args, run: RunConfig) -> int:
    cfg = run.opt()
    if args.what == "folner":
        return _cmd_folner(args, run)
    if args.what == "constant":
        G = group_from_spec(args.group)
        a = _parse_mean(G, args.mean)
        F = _parse_elements(G, json.loads(args.f))
        res = invariance_constant(G, a, F, args.p, args.q, cfg=cfg)
        payload = {"group": getattr(G, "name", G.kind),
                   "p": str(parse_exponent(args.p)),
                   "q": str(parse_exponent(args.q)), "seed": run.seed}
        payload.update(_norm_result_json(res))
        # the reported constant is per-candidate; the infimum over all
        # means is not certified
        payload["note"] = "constant for the given mean candidate only"
        _emit(run, payload, text_summary=f"C = {res.value}")
        return 0
    if args.what == "scan":
        G = group_from_spec(args.group)
        kwargs = {}
        if args.family == "connected":
            kwargs = {"radius": args.radius, "max_size": args.max_size}
        elif args.family == "rectangles":
            kwargs = {"max_side": args.max_side}
        else:
            kwargs = {"max_radius": args.max_radius}
        scan = pseudo_amenability_scan(G, range(args.n_min, args.n_max + 1),
                                       family=args.family, q=args.q, cfg=cfg,
                                       **kwargs)
        payload = scan.as_dict()
        payload["seed"] = run.seed
        _emit(run, payload, text_summary=f"fitted exponent: {scan.fitted_exponent}")
        return 0
    if args.what == "obstruct":
        if args.kind == "free":
            rep = freegroup_obstruction(args.q, args.n, radius=args.radius, cfg=cfg)
        elif args.kind == "compact":
            G = group_from_spec(args.group)
            a = _parse_mean(G, args.mean)
            rep = compactness_obstruction(G, a, args.q, args.n, cfg=cfg)
        else:
            raise InputError(f"unknown obstruction kind {args.kind!r}")
        payload = rep.as_dict()
        payload["seed"] = run.seed
        _emit(run, payload,
              text_summary=f"bound {rep.bound} <= value {rep.constant_value}")
        return 0 if rep.ok else 1
    raise InputError(f"unknown amen subcommand {args.what!r}")


def _cmd_module(args, run: RunConfig) -> int:
    cfg = run.opt()
    if args.what == "verify":
        G = group_from_spec(args.group)
        report = verify_module_identities(G, args.p, trials=args.trials, cfg=cfg)
        report["seed"] = run.seed
        _emit(run, report,
              text_summary=f"max residual {report['max_residual']:.3e}, "
                           f"ok={report['ok']}")
        return 0 if report["ok"] else 1
    if args.what == "demo":
        _module_demo()
        return 0
    raise InputError(f"unknown module subcommand {args.what!r}")


def _module_demo() -> None:
    from .groups import FiniteGroup

    G = FiniteGroup.cyclic(3)
    x = np.array([1.0, 2.0, -1.0])
    p = Exponent(2)
    print("cyclic group of order 3, p = 2")
    print("x =", x.tolist())
    print("Pi(x) rows (t-index), Pi(x)(t,s) = x(t^{-1}s):")
    print(Pi(G, x, p).entries)
    print("Q(Pi(x)) equals the augmentation embedding Pi~(x):")
    print(Q_map(Pi(G, x, p)).entries)
    R = retraction_from_mean(G, np.full(3, 1 / 3), p)
    print("uniform-mean retraction splits Pi~: R(Pi~ x) =",
          R.apply(PiTilde(G, x, p)).tolist())
    print("invariance constant of the uniform mean (upper bound):", R.norm_upper)


def _cmd_sweep(args, run: RunConfig) -> int:
    spec = _read_doc(args.spec)
    cfg = run.opt()
    rows = []
    kind = spec.get("kind")
    if kind == "folner":
        G = group_from_spec(spec["group"])
        q = spec.get("q", 2)
        kwargs = spec.get("family_args", {})
        for n in spec.get("n", []):
            t0 = time.perf_counter()
            scan = pseudo_amenability_scan(G, [n], family=spec.get("family", "balls"),
                                           q=q, cfg=cfg, **kwargs)
            row = dict(scan.rows[0])
            row["gap"] = 0.0
            row["runtime_s"] = round(time.perf_counter() - t0, 6)
            rows.append(row)
    elif kind == "invariance":
        G = group_from_spec(spec["group"])
        a = _parse_mean(G, spec.get("mean", {"kind": "delta"}))
        base = ball(G, int(spec.get("f_radius", 4)))
        for n in spec.get("n", []):
            for q in spec.get("q", [1]):
                t0 = time.perf_counter()
                F = base[:n]
                res = invariance_constant(G, a, F, spec.get("p", 1), q, cfg=cfg)
                rows.append({"n": n, "q": str(parse_exponent(q)),
                             "value": res.value, "gap": res.gap,
                             "runtime_s": round(time.perf_counter() - t0, 6)})
    elif kind is None:
        raise InputError("sweep spec needs a 'kind'")
    else:
        raise InputError(f"unknown sweep kind {kind!r}")
    body = _rows_to_csv(rows) if rows else ""
    if not rows:
        header = {"folner": "n,family,best_ratio,bound,gap,runtime_s",
                  "invariance": "n,q,value,gap,runtime_s"}[kind]
        body = header
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(body + "\n")
    else:
        sys.stdout.write(body + "\n")
    return 0


# --------------------------------------------------------------------------
# parser


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--guard", type=float, default=24.0,
                     help="partition enumeration guard in bits")
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", dest="fmt", default="json",
                     choices=["json", "csv", "text"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multinorms",
        description="multi-norms, amenability diagnostics and module checks "
                    "on finite discrete spaces")
    subs = parser.add_subparsers(dest="command", required=True)

    p_norm = subs.add_parser("norm", help="evaluate a multi-norm on a vector tuple")
    p_norm.add_argument("--kind", required=True,
                        choices=["weak", "standard", "max", "partition", "dual"])
    p_norm.add_argument("--p", default="1")
    p_norm.add_argument("--q", default="1")
    p_norm.add_argument("--r", default="1", help="ambient exponent")
    p_norm.add_argument("--s", default="2", help="dual norm weight exponent")
    p_norm.add_argument("--mode", default="auto",
                        choices=["auto", "exact", "greedy", "local_search"])
    p_norm.add_argument("--in", dest="input", default=None)
    _add_common(p_norm)

    p_mu = subs.add_parser("mu", help="weak p-summing norm")
    p_mu.add_argument("--p", default="1")
    p_mu.add_argument("--r", default="2")
    p_mu.add_argument("--in", dest="input", default=None)
    _add_common(p_mu)

    p_mb = subs.add_parser("mbnorm", help="multi-bounded operator norm")
    p_mb.add_argument("--p", default="2")
    p_mb.add_argument("--q", default="2")
    p_mb.add_argument("--kmax", type=int, default=6)
    p_mb.add_argument("--in", dest="input", default=None)
    _add_common(p_mb)

    p_check = subs.add_parser("check", help="axiom / ordering / duality suites")
    p_check.add_argument("what", choices=["axioms", "ordering", "duality"])
    p_check.add_argument("--engine", default="weak")
    p_check.add_argument("--p", default="1")
    p_check.add_argument("--q", default="1")
    p_check.add_argument("--r", default="1")
    p_check.add_argument("--s", default="2")
    p_check.add_argument("--p1", default="1")
    p_check.add_argument("--q1", default="2")
    p_check.add_argument("--p2", default="1")
    p_check.add_argument("--q2", default="1")
    p_check.add_argument("--m", type=int, default=3, help="space size")
    p_check.add_argument("--n-max", dest="n_max", type=int, default=3)
    p_check.add_argument("--trials", type=int, default=20)
    _add_common(p_check)

    p_fol = subs.add_parser("folner", help="Folner ratio or search")
    _folner_args(p_fol)
    _add_common(p_fol)

    p_amen = subs.add_parser("amen", help="amenability diagnostics")
    p_amen.add_argument("what", choices=["folner", "constant", "scan", "obstruct"])
    _folner_args(p_amen)
    p_amen.add_argument("--mean", default="uniform")
    p_amen.add_argument("--p", default="1")
    p_amen.add_argument("--q", default="2")
    p_amen.add_argument("--n", type=int, default=4)
    p_amen.add_argument("--n-min", dest="n_min", type=int, default=1)
    p_amen.add_argument("--n-max", dest="n_max", type=int, default=6)
    p_amen.add_argument("--kind", default="free", choices=["free", "compact"])
    _add_common(p_amen)

    p_mod = subs.add_parser("module", help="group module identity suite")
    p_mod.add_argument("what", choices=["verify", "demo"])
    p_mod.add_argument("--group", default="z3")
    p_mod.add_argument("--p", default="2")
    p_mod.add_argument("--trials", type=int, default=50)
    _add_common(p_mod)

    p_sweep = subs.add_parser("sweep", help="parameter grid to CSV")
    p_sweep.add_argument("--spec", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--guard", type=float, default=24.0)
    p_sweep.add_argument("--tol", type=float, default=1e-9)
    p_sweep.add_argument("--format", dest="fmt", default="csv")

    return parser


def _folner_args(sub):
    sub.add_argument("--group", default="Z")
    sub.add_argument("--f", default="[[0]]", help="JSON list of elements")
    sub.add_argument("--s", default=None, help="JSON list of elements (explicit S)")
    sub.add_argument("--family", default="balls",
                     choices=["balls", "connected", "rectangles"])
    sub.add_argument("--max-radius", dest="max_radius", type=int, default=8)
    sub.add_argument("--max-size", dest="max_size", type=int, default=8)
    sub.add_argument("--radius", type=int, default=4)
    sub.add_argument("--max-side", dest="max_side", type=int, default=16)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    run = RunConfig(seed=getattr(args, "seed", 0),
                    guard_bits=getattr(args, "guard", 24.0),
                    tol=getattr(args, "tol", 1e-9),
                    out=getattr(args, "out", None),
                    fmt=getattr(args, "fmt", "json"))
    dispatch = {
        "norm": _cmd_norm,
        "mu": _cmd_mu,
        "mbnorm": _cmd_mbnorm,
        "check": _cmd_check,
        "folner": _cmd_folner,
        "amen": _cmd_amen,
        "module": _cmd_module,
        "sweep": _cmd_sweep,
    }
    try:
        return dispatch[args.command](args, run)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
