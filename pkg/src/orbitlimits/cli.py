"""``orbitlimits`` command line front end.

Exit codes: 0 pass, 2 assertion failure, 3 resource bound exceeded, 4 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

from . import __version__
from .exceptions import (
    DegreeBoundExceeded,
    DimensionBoundExceeded,
    LatticeBoundExceeded,
    MemoryBoundExceeded,
    OrbitLimitsError,
    OrderBoundExceeded,
)
from .limits import DEFAULT_MEMORY_BOUND

EXIT_OK, EXIT_FAIL, EXIT_RESOURCE, EXIT_INPUT = 0, 2, 3, 4
RESOURCE_ERRORS = (MemoryBoundExceeded, OrderBoundExceeded, LatticeBoundExceeded,
                   DimensionBoundExceeded, DegreeBoundExceeded)


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    system: str | None
    group_file: str | None
    p: int | None
    j: int
    jmax: int | None
    imax: int
    mmax: int
    seed: int
    memory_bound: int
    output: str | None
    fmt: str
    allow_out_of_range: bool
    timing: bool

    def provenance(self):
        return {"tool": "orbitlimits", "version": __version__, "seed": self.seed,
                "bounds": {"memory": self.memory_bound, "imax": self.imax, "mmax": self.mmax}}


# -- input ---------------------------------------------------------------------------


def load_system(cfg):
    from .fusion import realize
    from .library import SYSTEMS, load_group_file, named_group

    if cfg.group_file:
        try:
            with open(cfg.group_file, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read group file {cfg.group_file}: {exc}") from exc
        if not isinstance(data, dict) or "generators" not in data or "degree" not in data:
            raise InputError("group file needs 'degree' and 'generators'")
        if "p" in data and cfg.p is not None and int(data["p"]) != cfg.p:
            raise InputError(f"group file requests p = {data['p']}, got --p {cfg.p}")
        p = cfg.p if cfg.p is not None else data.get("p")
        if p is None:
            raise InputError("no prime given (--p or 'p' in the group file)")
        try:
            G = load_group_file(cfg.group_file)
        except (ValueError, TypeError, KeyError, OrbitLimitsError) as exc:
            raise InputError(f"invalid group file: {exc}") from exc
        name = data.get("name") or os.path.basename(cfg.group_file)
    else:
        if not cfg.system:
            raise InputError("give --system or --group-file")
        group_name, default_p = SYSTEMS.get(cfg.system, (cfg.system, None))
        p = cfg.p if cfg.p is not None else default_p
        if p is None:
            raise InputError(f"--p is required for {cfg.system}")
        try:
            G = named_group(group_name)
        except KeyError as exc:
            raise InputError(str(exc)) from exc
        name = cfg.system
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise InputError(f"p = {p} is not prime")
    if G.order % p:
        raise InputError(f"p = {p} does not divide |G| = {G.order}")
    return realize(G, p, name=name)


def load_group(cfg):
    from .library import load_group_file, named_group

    if cfg.group_file:
        try:
            return load_group_file(cfg.group_file)
        except (OSError, ValueError, TypeError, KeyError, OrbitLimitsError) as exc:
            raise InputError(f"invalid group file: {exc}") from exc
    try:
        return named_group(cfg.system)
    except KeyError as exc:
        raise InputError(str(exc)) from exc


# -- commands --------------------------------------------------------------------------


def cmd_realize(cfg):
    fs = load_system(cfg)
    summary = fs.summary()
    rows = [[c["index"], c["order"], c["size"], c["centric"], c["aut_order"], c["out_order"]]
            for c in summary["classes"]]
    table = (["class", "order", "size", "centric", "aut_order", "out_order"], rows)
    return summary, table, summary["saturation"]["passed"]


def cmd_cohomology(cfg):
    from .cohomology import Cohomology

    fs = load_system(cfg)
    jmax = cfg.jmax if cfg.jmax is not None else fs.p - 1
    coh = Cohomology(fs.S, fs.p, jmax, seed=cfg.seed)
    centric = set(fs.centric_classes)
    rows = []
    for i, cls in enumerate(fs.classes):
        P = cls[0]
        rows.append([i, P.order, i in centric] + [coh.dim(P, j) for j in range(jmax + 1)])
    header = ["class", "order", "centric"] + [f"H{j}" for j in range(jmax + 1)]
    report = {"system": fs.name, "p": fs.p, "jmax": jmax, "resolution_ranks": coh.res.ranks,
              "table": [dict(zip(header, r)) for r in rows]}
    return report, (header, rows), True


def cmd_table(cfg):
    from .cohomology import Cohomology, MackeyH

    fs = load_system(cfg)
    jmax = cfg.jmax if cfg.jmax is not None else fs.p - 1
    coh = Cohomology(fs.S, fs.p, jmax, seed=cfg.seed)
    rows = []
    for j in range(jmax + 1):
        M = MackeyH(fs, j, coh)
        rows.append([j, M.check_axioms(), M.check_fusion_isos(),
                     [coh.dim(cls[0], j) for cls in fs.classes]])
    header = ["j", "mackey_checks", "iso_checks", "dims_by_class"]
    report = {"system": fs.name, "p": fs.p, "jmax": jmax,
              "table": [dict(zip(header, r)) for r in rows]}
    return report, (header, rows), True


def cmd_verify(cfg):
    from .cohomology import Cohomology
    from .limits import verify_vanishing

    fs = load_system(cfg)
    if cfg.j > fs.p - 2 and not cfg.allow_out_of_range:
        raise InputError(f"j = {cfg.j} > p - 2 = {fs.p - 2}; pass --allow-out-of-range for a stress run")
    coh = Cohomology(fs.S, fs.p, max(cfg.j, 1), seed=cfg.seed)
    report = verify_vanishing(fs, cfg.j, cfg.imax, coh, cfg.memory_bound)
    if not report["in_range"]:
        report["note"] = ("j > p - 2; vanishing is "
                          + ("consistent with sharpness" if report["pass"] else "not observed"))
    rows = [[i, d] for i, d in enumerate(report["direct"]["dims"])]
    return report, (["i", "dim_lim"], rows), report["pass"]


def cmd_stv(cfg, T_index, V_index):
    from .cohomology import Cohomology
    from .mackey_simple import check_q_trivial, cohomology_seeds, stv_value

    fs = load_system(cfg)
    if not 0 <= T_index < len(fs.classes):
        raise InputError(f"class index {T_index} out of range")
    T = fs.classes[T_index][0]
    coh = Cohomology(fs.S, fs.p, max(cfg.j, 1), seed=cfg.seed)
    seeds = cohomology_seeds(fs, coh, T, cfg.j)
    if not 0 <= V_index < len(seeds):
        raise InputError(f"H^{cfg.j}(T) has {len(seeds)} composition factors")
    seed, mult = seeds[V_index]
    rows, ok = [], True
    for Q in fs.centric_representatives:
        value = stv_value(seed, Q)
        qt = check_q_trivial(value)
        ok &= qt
        rows.append([fs.classes.index(next(c for c in fs.classes if c[0] == Q)), Q.order,
                     [b.dim for b in value.blocks], value.dim, value.dim == 0, qt])
    header = ["Q_class", "Q_order", "block_dims", "dim", "zero", "Q_trivial"]
    report = {"system": fs.name, "p": fs.p, "j": cfg.j, "T_class": T_index,
              "V_index": V_index, "V_dim": seed.V.dim, "V_multiplicity": mult,
              "values": [dict(zip(header, r)) for r in rows]}
    return report, (header, rows), ok


def cmd_lambda(cfg, module):
    from .fplinalg import FpModule, composition_factors, regular_module
    from .limits import lambda_, radical_chain_criterion

    G = load_group(cfg)
    p = cfg.p
    if p is None:
        raise InputError("--p is required")
    if module == "trivial":
        M = FpModule.trivial(p, G)
    elif module == "regular":
        M = regular_module(p, G)
    elif module.startswith("factor:"):
        factors = composition_factors(regular_module(p, G), seed=cfg.seed)
        k = int(module.split(":", 1)[1])
        if not 0 <= k < len(factors):
            raise InputError(f"only {len(factors)} simple modules found")
        M = factors[k][0]
    else:
        raise InputError("module must be trivial, regular or factor:<k>")
    res = lambda_(G, p, M, cfg.mmax, memory_bound=cfg.memory_bound)
    direct = lambda_(G, p, M, cfg.mmax, memory_bound=cfg.memory_bound, fast=False)
    crit = [radical_chain_criterion(G, p, M, m) for m in range(1, cfg.mmax + 1)]
    ok = res.dims == direct.dims and all(
        not c or direct.dims[m] == 0 for m, c in enumerate(crit, start=1))
    report = {"group": G.name or cfg.group_file, "order": G.order, "p": p, "module": module,
              "module_dim": M.dim, "dims": res.dims, "route": res.route,
              "computed_dims": direct.dims, "computed_engine": direct.engine,
              "radical_chain_criterion": crit, "consistent": ok}
    rows = [[m, d] for m, d in enumerate(res.dims)]
    return report, (["m", "dim_lambda"], rows), ok


def cmd_limits(cfg, functor, engine):
    from .cohomology import Cohomology
    from .limits import cohomology_functor, constant_functor, higher_limits, lim0_stable_elements

    fs = load_system(cfg)
    cat = fs.orbit_category(centric_only=True)
    if functor == "constant":
        fun = constant_functor(cat, fs.p)
    elif functor == "cohomology":
        coh = Cohomology(fs.S, fs.p, max(cfg.j, 1), seed=cfg.seed)
        fun = cohomology_functor(fs, coh, cfg.j, cat)
    else:
        raise InputError("functor must be constant or cohomology")
    res = higher_limits(fun, cfg.imax, engine, cfg.memory_bound)
    stable, _ = lim0_stable_elements(fun)
    report = {"functor": functor if functor == "constant" else f"H^{cfg.j}",
              "system": fs.name, "p": fs.p, "dims": res.dims, "imax": cfg.imax,
              "route": "direct", "engine": res.engine, "chain_counts": res.chain_counts,
              "lim0_stable_elements": stable}
    rows = [[i, d] for i, d in enumerate(res.dims)]
    return report, (["i", "dim_lim"], rows), stable == res.dims[0]


# -- output ------------------------------------------------------------------------------


def render(cfg, report, table):
    doc = {"provenance": cfg.provenance(), "command": cfg.command, "report": report}
    if cfg.fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n"
    header, rows = table
    if cfg.fmt == "csv":
        buf = io.StringIO()
        buf.write("# " + json.dumps(cfg.provenance(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([json.dumps(x) if isinstance(x, (list, dict)) else x for x in r])
        return buf.getvalue()
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    lines = [f"# orbitlimits {__version__} seed={cfg.seed} command={cfg.command}",
             "  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(str(x).ljust(w) for x, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def _jsonable(x):
    try:
        import numpy as np

        if isinstance(x, np.integer):
            return int(x)
        if isinstance(x, np.ndarray):
            return x.tolist()
    except ImportError:  # pragma: no cover
        pass
    return str(x)


# -- parser ------------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="orbitlimits",
                                     description="Fusion systems, Mackey functors and higher limits over F_p.")
    parser.add_argument("--version", action="version", version=f"orbitlimits {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--system", help="library system or group name")
    src.add_argument("--group", dest="system", help="alias of --system")
    src.add_argument("--group-file", help="JSON file with 'degree', 'generators' and optional 'p'")
    common.add_argument("--p", type=int)
    common.add_argument("--j", type=int, default=0)
    common.add_argument("--jmax", type=int)
    common.add_argument("--imax", type=int, default=3)
    common.add_argument("--mmax", type=int, default=3)
    common.add_argument("--seed", type=int)
    common.add_argument("--memory-bound", type=int, default=DEFAULT_MEMORY_BOUND)
    common.add_argument("--output")
    common.add_argument("--format", dest="fmt", choices=["json", "csv", "text"], default="json")
    common.add_argument("--allow-out-of-range", action="store_true")
    common.add_argument("--timing", action="store_true",
                        help="report wall-clock time on stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("realize", parents=[common], help="classes, centric subgroups, saturation")
    sub.add_parser("verify", parents=[common], help="vanishing of higher limits by two routes")
    sub.add_parser("cohomology", parents=[common], help="dim H^j for every class representative")
    sub.add_parser("table", parents=[common], help="Mackey functor axiom checks per degree")
    stv = sub.add_parser("stv", parents=[common], help="values of a simple Mackey functor")
    stv.add_argument("--T", type=int, required=True, help="class index of T")
    stv.add_argument("--V", type=int, default=0, help="composition factor index of H^j(T)")
    lam = sub.add_parser("lambda", parents=[common], help="Lambda functors of a group")
    lam.add_argument("--module", default="trivial", help="trivial | regular | factor:<k>")
    lim = sub.add_parser("limits", parents=[common], help="higher limits on the centric orbit skeleton")
    lim.add_argument("--functor", default="constant", help="constant | cohomology")
    lim.add_argument("--engine", default="auto", choices=["auto", "bar", "resolution"])
    return parser


def make_config(args):
    seed = args.seed
    if seed is None:
        env = os.environ.get("ORBITLIMITS_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError as exc:
            raise InputError(f"ORBITLIMITS_SEED must be an integer, got {env!r}") from exc
    if seed < 0:
        raise InputError("seed must be unsigned")
    if args.j < 0 or args.imax < 1 or args.mmax < 1:
        raise InputError("need j >= 0 and imax, mmax >= 1")
    return RunConfig(args.command, args.system, args.group_file, args.p, args.j, args.jmax,
                     args.imax, args.mmax, seed, args.memory_bound, args.output, args.fmt,
                     args.allow_out_of_range, args.timing)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = make_config(args)
        if cfg.command == "realize":
            out = cmd_realize(cfg)
        elif cfg.command == "cohomology":
            out = cmd_cohomology(cfg)
        elif cfg.command == "table":
            out = cmd_table(cfg)
        elif cfg.command == "verify":
            out = cmd_verify(cfg)
        elif cfg.command == "stv":
            out = cmd_stv(cfg, args.T, args.V)
        elif cfg.command == "lambda":
            out = cmd_lambda(cfg, args.module)
        else:
            out = cmd_limits(cfg, args.functor, args.engine)
    except InputError as exc:
        print(f"orbitlimits: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RESOURCE_ERRORS as exc:
        print(f"orbitlimits: bound exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    report, table, ok = out
    text = render(cfg, report, table)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.timing:
        print(f"wall-clock: {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
