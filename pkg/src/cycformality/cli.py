"""Command line interface: ``cycformality <group> <action> [options]``.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error, 3 I/O error.
Options may also come from a ``key = value`` file given with ``--config``;
flags on the command line win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .formality import (DEFAULT_SEED, WEIGHT_RELATION_SUITE, WeightSource, check_cyclic_invariance,
                        check_linfty, check_weight_relation, parse_input)
from .graphs import enumerate_graphs, parse_graph
from .selftest import algebra_suites, sigma_suites
from .star import build_star, check_associativity, check_closed, loads_star, parse_poisson
from .weights import CACHE_ENV, WeightCache, integrate

MIN_SAMPLES = 10_000
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunConfig:
    dim: int = 2
    samples: int = 2_000_000
    seed: int = DEFAULT_SEED
    tol_sigmas: float = 3.0
    sigma_ceiling: float = 0.02
    cache: str | None = None
    format: str = "text"

    def weights(self):
        return WeightSource(self.samples, self.seed, WeightCache(self.cache))


_CASTS = {"dim": int, "samples": int, "seed": lambda s: int(s, 0), "tol_sigmas": float,
          "sigma_ceiling": float, "cache": str, "format": str}


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{no}: expected key = value")
            key, val = (t.strip() for t in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CASTS:
                raise ValueError(f"{path}:{no}: unknown key {key!r}")
            out[key] = _CASTS[key](val)
    return out


def resolve_config(args) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config(args.config))
    if os.environ.get(CACHE_ENV):
        values.setdefault("cache", os.environ[CACHE_ENV])
    for key in _CASTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values)


# -- commands; each returns (passed, text, json-able object)

def cmd_graphs_enumerate(cfg, args):
    outdegs = [int(t) for t in args.outdegrees.split(",")] if args.outdegrees else []
    if len(outdegs) != args.m:
        raise UsageError("--outdegrees needs one entry per type I vertex")
    gs = enumerate_graphs(args.m, args.n, outdegs, allow_tadpoles=not args.no_tadpoles)
    lines = [g.canon() for g in gs]
    text = "\n".join(lines + [f"# {len(gs)} graphs"])
    return True, text, {"count": len(gs), "graphs": [g.to_json() for g in gs]}


def _upows(args, g):
    if args.upows:
        return tuple(int(t) for t in args.upows.split(","))
    return (0,) * g.m


def cmd_weight_compute(cfg, args):
    g = parse_graph(args.graph)
    upows = _upows(args, g)
    w = integrate(g, upows, cfg.samples, cfg.seed, anchor=complex(args.anchor),
                  cache=WeightCache(cfg.cache))
    text = f"{g.canon()}  u={list(upows)}  {w.value:.6f} +- {w.stderr:.2g}  ({w.samples} samples, seed {w.seed:#x})"
    return True, text, {"graph": g.canon(), "upows": list(upows), "value": w.value, "stderr": w.stderr,
                        "samples": w.samples, "seed": w.seed}


def _reports(reports):
    ok = all(r.passed for r in reports)
    text = "\n\n".join(r.to_text() for r in reports)
    return ok, text, {"passed": ok, "reports": [r.to_json() for r in reports]}


def cmd_weight_relations(cfg, args):
    if args.graph:
        suite = [(args.graph, _upows(args, parse_graph(args.graph)))]
    else:
        suite = WEIGHT_RELATION_SUITE
    ws = cfg.weights()
    return _reports([check_weight_relation(parse_graph(t), u, ws, cfg.tol_sigmas, cfg.sigma_ceiling)
                     for t, u in suite])


def _inputs(cfg, args):
    if not args.input:
        raise UsageError("give at least one --input")
    return [parse_input(t, cfg.dim) for t in args.input]


def cmd_linfty_check(cfg, args):
    return _reports([check_linfty(_inputs(cfg, args), cfg.weights(), cfg.tol_sigmas, cfg.sigma_ceiling)])


def cmd_cyclic_check(cfg, args):
    return _reports([check_cyclic_invariance(_inputs(cfg, args), cfg.weights(), cfg.tol_sigmas,
                                             cfg.sigma_ceiling)])


def _star(cfg, args):
    if args.star:
        with open(args.star) as fh:
            return loads_star(fh.read())
    if not args.poisson:
        raise UsageError("give --poisson or --star")
    p = parse_poisson(args.poisson, cfg.dim, args.order)
    return build_star(p, args.order, cfg.weights(), require_mc=not args.allow_non_unimodular)


def cmd_star_build(cfg, args):
    s = _star(cfg, args)
    text = s.dumps()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    return True, text.rstrip("\n"), {"dim": s.dim, "order": s.order, "text": text}


def cmd_star_assoc(cfg, args):
    return _reports([check_associativity(_star(cfg, args), cfg.tol_sigmas, cfg.sigma_ceiling)])


def cmd_star_closed(cfg, args):
    return _reports([check_closed(_star(cfg, args), cfg.tol_sigmas, cfg.sigma_ceiling)])


def cmd_algebra_selftest(cfg, args):
    results = algebra_suites(args.count, cfg.seed) + sigma_suites(args.count, cfg.seed)
    ok = all(r.passed for r in results)
    text = "\n".join([r.line() for r in results] + [f"selftest: {'PASS' if ok else 'FAIL'}"])
    return ok, text, {"passed": ok, "suites": [{"name": r.name, "instances": r.instances,
                                               "failures": r.failures} for r in results]}


# -- parser

class UsageError(Exception):
    pass


def _common(weighted=False):
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key = value file with default options")
    p.add_argument("--dim", type=int, help="dimension d of R^d")
    p.add_argument("--seed", type=lambda s: int(s, 0), help="base seed (default 0xC0FFEE)")
    p.add_argument("--format", choices=("text", "json"), help="stdout format")
    p.add_argument("--json", dest="json_path", help="also write the JSON report to this file")
    if weighted:
        p.add_argument("--samples", type=int, help="Monte Carlo samples per weight")
        p.add_argument("--cache", help=f"weight cache file (or ${CACHE_ENV})")
        p.add_argument("--tol-sigmas", dest="tol_sigmas", type=float, help="tolerance in standard errors")
        p.add_argument("--sigma-ceiling", dest="sigma_ceiling", type=float, help="largest acceptable sigma")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="cycformality", description="Cyclic formality workbench.")
    groups = parser.add_subparsers(dest="group", required=True)
    plain, weighted = _common(), _common(True)

    def action(group, name, func, helptext, weighted_cmd=True):
        sp = group.add_parser(name, parents=[weighted if weighted_cmd else plain], help=helptext)
        sp.set_defaults(func=func, weighted=weighted_cmd)
        return sp

    g = groups.add_parser("graphs").add_subparsers(dest="action", required=True)
    sp = action(g, "enumerate", cmd_graphs_enumerate, "list extended graphs", weighted_cmd=False)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--outdegrees", default="", help="comma separated outdegrees, one per type I vertex")
    sp.add_argument("--no-tadpoles", action="store_true")

    g = groups.add_parser("weight").add_subparsers(dest="action", required=True)
    sp = action(g, "compute", cmd_weight_compute, "integrate one weight")
    sp.add_argument("--graph", required=True, help='e.g. "1 1 | b1"')
    sp.add_argument("--upows", help="comma separated u-powers")
    sp.add_argument("--anchor", default="0", help="pinned position of the first interior point")
    sp = action(g, "relations", cmd_weight_relations, "check quadratic weight relations")
    sp.add_argument("--graph", help="a single graph instead of the built-in suite")
    sp.add_argument("--upows")

    for name, func in (("linfty", cmd_linfty_check), ("cyclic", cmd_cyclic_check)):
        g = groups.add_parser(name).add_subparsers(dest="action", required=True)
        sp = action(g, "check", func, f"check the {name} identity")
        sp.add_argument("--input", action="append", help='repeatable, e.g. "x1 d1^d2" or "u (x1)"')

    g = groups.add_parser("star").add_subparsers(dest="action", required=True)
    for name, func in (("build", cmd_star_build), ("assoc", cmd_star_assoc), ("closed", cmd_star_closed)):
        sp = action(g, name, func, f"star product: {name}")
        sp.add_argument("--poisson", help='e.g. "hbar x3 d1^d2"')
        sp.add_argument("--star", help="read a star product written by star build")
        sp.add_argument("--order", type=int, default=2)
        sp.add_argument("--allow-non-unimodular", action="store_true")
        if name == "build":
            sp.add_argument("--output", help="write the star product to this file")

    g = groups.add_parser("algebra").add_subparsers(dest="action", required=True)
    sp = action(g, "selftest", cmd_algebra_selftest, "exact identity suites", weighted_cmd=False)
    sp.add_argument("--count", type=int, default=200, help="random instances per identity")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.weighted and cfg.samples < MIN_SAMPLES:
        print(f"error: --samples must be at least {MIN_SAMPLES}", file=sys.stderr)
        return EXIT_USAGE
    try:
        ok, text, obj = args.func(cfg, args)
        if args.json_path:
            with open(args.json_path, "w") as fh:
                json.dump(obj, fh, indent=2)
                fh.write("\n")
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(obj, indent=2) if cfg.format == "json" else text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
