"""Command-line front end: experiment orchestration and artifact export."""

from __future__ import annotations

import argparse
import os
import sys
from .artifacts import ExperimentResult, write_json
from .config import ConfigError, load_config
from .experiments import BuildCache, run_experiments

BATTERY = ["lipcert", "lemma82", "ballcard", "claimj", "goodset", "sandwich",
           "folnervolume", "defect", "fdmass", "covolume", "cylinder",
           "strongexp"]

SUBCOMMAND_EXPERIMENTS = {
    "profile": ["profile"],
    "integrability": ["integrability"],
    "lemma82": ["lemma82", "ballcard"],
    "claimj": ["claimj"],
    "fdmass": ["fdmass"],
    "covolume": ["covolume"],
    "export": ["export"],
    "all": BATTERY,
}


def _build_only(cfg, out_dir: str) -> int:
    cache = BuildCache(cfg)
    k = cfg.get_int("map", "k")
    a = cfg.get_matrix("map", "a")
    t = cfg.get_fraction("map", "t")
    n = cfg.get_int("couple", "n")
    result = ExperimentResult("build")
    F = cache.lamp_graph(k, n)
    result.summary["lamplighter"] = {"k": k, "n": n, "vertices": F.num_vertices,
                                     "labels": F.labels}
    mode = cfg.get("map", "mode")
    L = cfg.get_int("map", "l_enlarge")
    C = cfg.get_fraction("map", "c_thicken")
    H = cache.sol_graph(a, k, t, n, mode, L, C)
    result.summary["sol_lattice"] = {key: val for key, val in H.meta.items()
                                     if key != "core_mask"}
    result.summary["generating_sets"] = {
        "lamplighter": F.labels,
        "sol_lattice": H.labels,
    }
    eig = cache.eigen(a, k)
    result.summary["tile_ball_constant_C"] = str(eig.ball_constant(t))
    os.makedirs(out_dir, exist_ok=True)
    write_json(result, os.path.join(out_dir, "build.json"),
               config_snapshot=cfg.snapshot())
    print(f"build: lamplighter {F.num_vertices} vertices, "
          f"sol lattice {H.num_vertices} vertices -> {out_dir}/build.json")
    return 0


def _map_only(cfg, out_dir: str) -> int:
    cache = BuildCache(cfg)
    k = cfg.get_int("map", "k")
    a = cfg.get_matrix("map", "a")
    t = cfg.get_fraction("couple", "t")
    L = cfg.get_int("couple", "l_enlarge")
    n = cfg.get_int("couple", "n")
    M = cache.coupling(k, a, t, n, L)
    result = ExperimentResult("map")
    result.summary["fiber_report"] = {
        "num_fibers": M.fiber_report.num_fibers,
        "num_fibers_ge2": M.fiber_report.num_fibers_ge2,
        "max_fiber_size": M.fiber_report.max_fiber_size,
        "injective": M.fiber_report.injective,
    }
    result.summary["meta"] = M.meta
    os.makedirs(out_dir, exist_ok=True)
    from .coupling import export_coupling

    path = os.path.join(out_dir, f"coupling_n{n}.txt")
    export_coupling(M, path)
    result.summary["export_path"] = path
    write_json(result, os.path.join(out_dir, "map.json"),
               config_snapshot=cfg.snapshot())
    print(f"map: {M.domain.num_vertices} vertices, "
          f"{M.fiber_report.num_fibers_ge2} fibers of size >= 2 -> {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="soficlab",
        description="Folner-graph sofic approximations, coupling maps, and "
                    "statistical coarse-geometry measurements",
    )
    parser.add_argument("command",
                        choices=["build", "map", "profile", "integrability",
                                 "lemma82", "claimj", "fdmass", "covolume",
                                 "export", "all", "run"],
                        help="subcommand: build graphs, tabulate the map, or run experiments")
    parser.add_argument("--config", default=None, help="config file (ini-style sections)")
    parser.add_argument("--set", action="append", default=[], metavar="SEC.KEY=VAL",
                        help="override a config value (repeatable)")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--experiments", default=None,
                        help="space-separated experiment ids (run subcommand)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.set)
        out_dir = args.out or cfg.get("run", "out_dir")
        if args.command == "build":
            return _build_only(cfg, out_dir)
        if args.command == "map":
            return _map_only(cfg, out_dir)
        if args.command == "run":
            ids = (args.experiments.split() if args.experiments
                   else cfg.get_str_list("run", "experiments"))
            if not ids:
                return _build_only(cfg, out_dir)
        else:
            ids = SUBCOMMAND_EXPERIMENTS[args.command]
        code, results = run_experiments(cfg, ids, out_dir)
        for result in results:
            status = "pass" if result.passed else "FAIL"
            print(f"{result.experiment_id}: {status} "
                  f"({len(result.rows)} rows, {len(result.assertions)} assertions)")
            for a in result.assertions:
                if not a.passed:
                    print(f"    FAILED {a.name}: measured {a.measured} vs bound {a.bound}")
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
