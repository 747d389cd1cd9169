"""Batch experiment runner.

Subcommands map onto the library modules; every run is driven by a strict
versioned JSON config plus numeric flag overrides, and every output file
embeds the config hash and seed (JSON fields, or the file-name stem for
CSV formats).

Exit codes: 0 ok, 1 verification failures, 2 config/schema problem,
3 ensemble-constraint violation, 4 numerical non-convergence,
5 missing file.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance, fekete, measures, partition, potential, sampler, stats

SCHEMA_VERSION = 1

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "set": {"type": "disk", "center": [0.0, 0.0], "radius": 1.0},
    "ensemble": {"N": 16, "s": 32.0, "beta": 2.0, "c0": 0.1},
    "seed": 0,
    "output_dir": "coulomblab_out",
    "sample": {"steps": 50000, "burn_in": 5000, "thin": 10, "step_scale": None},
    "fekete": {"N": 16, "starts": None, "max_iterations": 5000},
    "partition": {"N_values": None, "s_values": None, "with_cubature": False,
                  "with_bounds": False},
    "rate": {"radii": [0.25, 0.5, 2.0, 4.0], "ells": [0.25, 0.5, 1.0]},
    "linstat": {"statistics": ["abs2", "z", "pair_product"], "moments": [[1, 1]],
                "bins": 64},
    "discretize": {"N": 256, "epsilon": 0.1, "base_atoms": 256,
                   "bl_nodes_per_block": 8},
    "verify": {"criteria": None},
}


class SchemaError(ValueError):
    pass


class NonConvergenceError(RuntimeError):
    pass


def _check_schema(cfg: dict, reference: dict, path: str = "") -> None:
    """Reject unknown keys anywhere in the config tree."""
    for key, value in cfg.items():
        if key not in reference:
            raise SchemaError(f"unknown config key {path + key!r}")
        if isinstance(value, dict) and isinstance(reference[key], dict) and key != "set":
            _check_schema(value, reference[key], path + key + ".")


def load_config(path=None, overrides: dict | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"config file {p} does not exist")
        try:
            user = json.loads(p.read_text())
        except json.JSONDecodeError as e:
            raise SchemaError(f"config is not valid JSON: {e}") from e
        if not isinstance(user, dict):
            raise SchemaError("config root must be a JSON object")
        if user.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"config schema_version must be {SCHEMA_VERSION}")
        _check_schema(user, DEFAULT_CONFIG)
        for key, value in user.items():
            if isinstance(value, dict) and key != "set":
                cfg[key].update(value)
            else:
                cfg[key] = value
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        node = cfg
        *parents, leaf = dotted.split(".")
        for part in parents:
            node = node[part]
        node[leaf] = value
    return cfg


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _parse_s(value):
    if value in ("inf", "Infinity", math.inf):
        return math.inf
    return float(value)


def _build(cfg: dict):
    K = potential.compact_set_from_dict(cfg["set"])
    ens = cfg["ensemble"]
    params = sampler.EnsembleParams(int(ens["N"]), _parse_s(ens["s"]),
                                    float(ens["beta"]), float(ens["c0"]))
    return K, params


def _outdir(cfg: dict, args) -> Path:
    out = Path(args.out if args.out else cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _stem(name: str, cfg: dict) -> str:
    return f"{name}_{config_hash(cfg)}_seed{cfg['seed']}"


def _write_json(path: Path, payload: dict, cfg: dict) -> None:
    payload = {"config_sha256_12": config_hash(cfg), "seed": cfg["seed"], **payload}
    path.write_text(json.dumps(payload, indent=2, default=str))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_sample(cfg, args) -> int:
    K, params = _build(cfg)
    sc = cfg["sample"]
    chain_cfg = sampler.ChainConfig(int(sc["steps"]), int(sc["burn_in"]),
                                    int(sc["thin"]), sc["step_scale"])
    chain = sampler.run_chain(params, K, chain_cfg, seed=cfg["seed"])
    out = _outdir(cfg, args)
    base = out / _stem("chain", cfg)
    chain.save(base)
    _write_json(out / (_stem("chain", cfg) + "_summary.json"),
                {"states": len(chain), "acceptance": chain.acceptance_rate,
                 "step_scale": chain.step_scale,
                 "psr": sampler.potential_scale_reduction(chain)}, cfg)
    print(f"chain: {len(chain)} states, acceptance {chain.acceptance_rate:.3f} -> {base}.csv")
    if chain.zero_acceptance_burnin:
        raise NonConvergenceError("zero acceptance during burn-in")
    return 0


def _cmd_fekete(cfg, args) -> int:
    K, _ = _build(cfg)
    fc = cfg["fekete"]
    n = int(fc["N"])
    result = fekete.solve(K, n, starts=fc["starts"],
                          max_iterations=int(fc["max_iterations"]), seed=cfg["seed"])
    out = _outdir(cfg, args)
    base = out / _stem("fekete", cfg)
    result.save(base)
    est = fekete.capacity_estimate(K, n, result=result) if n >= 8 else None
    _write_json(out / (_stem("fekete", cfg) + "_summary.json"),
                {"N": n, "log_delta": result.log_delta,
                 "max_green_violation": result.max_green_violation,
                 "converged": result.converged, "iterations": result.iterations,
                 "capacity_estimate": est, "capacity": K.capacity()}, cfg)
    print(f"fekete N={n}: log_delta={result.log_delta:.9g} "
          f"violation={result.max_green_violation:.2e} converged={result.converged}")
    if est is not None:
        print(f"capacity estimate {est:.6f} (closed form {K.capacity():.6f})")
    if not result.converged:
        raise NonConvergenceError("no fekete start reached the gradient tolerance")
    return 0


def _cmd_partition(cfg, args) -> int:
    K, params = _build(cfg)
    pc = cfg["partition"]
    n_values = pc["N_values"] or [params.N]
    s_values = [_parse_s(s) for s in (pc["s_values"] or [params.s])]
    out = _outdir(cfg, args)
    rows, reports = [], []
    for n in n_values:
        for s in s_values:
            p = sampler.EnsembleParams(int(n), s, params.beta, params.c0)
            fr = fekete.solve(K, int(n), seed=cfg["seed"]) if pc["with_bounds"] and n >= 2 else None
            rep = partition.build_report(K, p, fekete_result=fr,
                                         with_cubature=pc["with_cubature"] and n <= 3)
            rows.append(rep.csv_row())
            reports.append(rep.to_dict())
            print(rep.csv_row())
    base = out / _stem("partition", cfg)
    base.with_suffix(".csv").write_text(
        partition.PartitionReport.CSV_HEADER + "\n" + "\n".join(rows) + "\n")
    _write_json(base.with_suffix(".json"), {"reports": reports}, cfg)
    return 0


def _cmd_rate(cfg, args) -> int:
    K, params = _build(cfg)
    rc = cfg["rate"]
    family = [(f"circle_r={r}", measures.CircleMeasure(0.0, float(r)))
              for r in rc["radii"]]
    reports = stats.positivity_scan(K, family, [float(x) for x in rc["ells"]],
                                    beta=params.beta)
    out = _outdir(cfg, args)
    base = out / _stem("rate", cfg)
    lines = ["measure,ell,weighted_energy,robin_energy,rate"]
    for r in reports:
        lines.append(f"{r.descriptor},{r.ell},{r.weighted:.12g},{r.robin:.12g},{r.rate:.12g}")
        print(lines[-1])
    base.with_suffix(".csv").write_text("\n".join(lines) + "\n")
    _write_json(base.with_suffix(".json"), {"rows": [r.to_dict() for r in reports]}, cfg)
    return 0


_STAT_LIBRARY = {
    "abs2": (lambda z: np.abs(z) ** 2, 1),
    "z": (lambda z: z, 1),
    "pair_product": (lambda a, b: (a * np.conj(b)).real, 2),
}


def _cmd_linstat(cfg, args) -> int:
    K, params = _build(cfg)
    sc = cfg["sample"]
    chain_cfg = sampler.ChainConfig(int(sc["steps"]), int(sc["burn_in"]),
                                    int(sc["thin"]), sc["step_scale"])
    chain = sampler.run_chain(params, K, chain_cfg, seed=cfg["seed"])
    lc = cfg["linstat"]
    reports = []
    for name in lc["statistics"]:
        if name not in _STAT_LIBRARY:
            raise SchemaError(f"unknown statistic {name!r}; "
                              f"available: {sorted(_STAT_LIBRARY)}")
        f, n = _STAT_LIBRARY[name]
        reports.append(stats.linear_statistic(chain, f, n, label=name))
    for k, m in lc["moments"]:
        reports.append(stats.moment_statistic(chain, _STAT_LIBRARY["abs2"][0],
                                              int(k), int(m), label=f"moment_abs2_{k}_{m}"))
    out = _outdir(cfg, args)
    base = out / _stem("linstat", cfg)
    hist = stats.intensity_histogram(chain, bins=int(lc["bins"]))
    hist.to_csv(base.with_suffix(".hist.csv"))
    _write_json(base.with_suffix(".json"), {"reports": [r.to_dict() for r in reports]}, cfg)
    for r in reports:
        print(f"{r.label}: estimate={r.estimate:.6g} target={r.target:.6g} "
              f"stderr={r.stderr:.2e} z={r.zscore:.2f}")
    return 0


def _cmd_discretize(cfg, args) -> int:
    K, _ = _build(cfg)
    dc = cfg["discretize"]
    base_measure = measures.equilibrium_discretization(K, int(dc["base_atoms"]))
    nu = measures.smooth(base_measure, float(dc["epsilon"]))
    res = measures.discretize(nu, int(dc["N"]))
    bl = res.bl_to(nu, nodes_per_block=int(dc["bl_nodes_per_block"]))
    out = _outdir(cfg, args)
    base = out / _stem("discretize", cfg)
    res.configuration.save_csv(base.with_suffix(".csv"))
    payload = {"N": int(dc["N"]), "min_separation": res.min_separation,
               "separation_constant": res.separation_constant,
               "discrete_energy": res.discrete_energy,
               "continuous_energy": measures.continuous_energy(nu),
               "bl_distance": bl, "points_discarded": res.points_discarded}
    _write_json(base.with_suffix(".json"), payload, cfg)
    for k, v in payload.items():
        print(f"{k}: {v}")
    return 0


def _cmd_verify(cfg, args) -> int:
    numbers = cfg["verify"]["criteria"]
    results = acceptance.run_all(numbers=numbers, verbose=True)
    out = _outdir(cfg, args)
    payload = {"criteria": [r.to_dict() for r in results],
               "all_pass": all(r.passed for r in results)}
    _write_json(out / (_stem("verify", cfg) + ".json"), payload, cfg)
    return 0 if payload["all_pass"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="coulomblab",
        description="batch experiments for two-dimensional potential-theoretic ensembles")
    parser.add_argument("--config", help="JSON config path", default=None)
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--out", default=None, help="output directory override")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="run a Metropolis chain and persist it")
    sp.add_argument("--N", type=int); sp.add_argument("--s"); sp.add_argument("--beta", type=float)
    sp.add_argument("--c0", type=float); sp.add_argument("--steps", type=int)
    sp.add_argument("--burn-in", type=int, dest="burn_in"); sp.add_argument("--thin", type=int)

    fp = sub.add_parser("fekete", help="solve for Fekete points and estimate capacity")
    fp.add_argument("--N", type=int)

    pp = sub.add_parser("partition", help="partition reports and tables")
    pp.add_argument("--N", type=int); pp.add_argument("--s"); pp.add_argument("--beta", type=float)
    pp.add_argument("--c0", type=float)
    pp.add_argument("--with-cubature", action="store_true", dest="with_cubature")
    pp.add_argument("--with-bounds", action="store_true", dest="with_bounds")

    rp = sub.add_parser("rate", help="rate-function tables over the circle family")
    rp.add_argument("--beta", type=float)

    lp = sub.add_parser("linstat", help="linear statistics and intensity histogram")
    lp.add_argument("--N", type=int); lp.add_argument("--s"); lp.add_argument("--beta", type=float)
    lp.add_argument("--c0", type=float); lp.add_argument("--steps", type=int)
    lp.add_argument("--burn-in", type=int, dest="burn_in"); lp.add_argument("--thin", type=int)

    dp = sub.add_parser("discretize", help="strip discretization with diagnostics")
    dp.add_argument("--N", type=int); dp.add_argument("--epsilon", type=float)

    vp = sub.add_parser("verify", help="run the acceptance suite")
    vp.add_argument("--criteria", help="comma-separated criterion numbers", default=None)

    args = parser.parse_args(argv)

    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    mapping = {
        "sample": {"N": "ensemble.N", "s": "ensemble.s", "beta": "ensemble.beta",
                   "c0": "ensemble.c0", "steps": "sample.steps",
                   "burn_in": "sample.burn_in", "thin": "sample.thin"},
        "fekete": {"N": "fekete.N"},
        "partition": {"N": "ensemble.N", "s": "ensemble.s", "beta": "ensemble.beta",
                      "c0": "ensemble.c0", "with_cubature": "partition.with_cubature",
                      "with_bounds": "partition.with_bounds"},
        "rate": {"beta": "ensemble.beta"},
        "linstat": {"N": "ensemble.N", "s": "ensemble.s", "beta": "ensemble.beta",
                    "c0": "ensemble.c0", "steps": "sample.steps",
                    "burn_in": "sample.burn_in", "thin": "sample.thin"},
        "discretize": {"N": "discretize.N", "epsilon": "discretize.epsilon"},
        "verify": {},
    }
    for attr, dotted in mapping[args.command].items():
        value = getattr(args, attr, None)
        if value is not None and value is not False:
            overrides[dotted] = value
    if args.command == "verify" and args.criteria:
        overrides["verify.criteria"] = [int(x) for x in args.criteria.split(",")]

    handlers = {"sample": _cmd_sample, "fekete": _cmd_fekete,
                "partition": _cmd_partition, "rate": _cmd_rate,
                "linstat": _cmd_linstat, "discretize": _cmd_discretize,
                "verify": _cmd_verify}
    try:
        cfg = load_config(args.config, overrides)
        return handlers[args.command](cfg, args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 5
    except SchemaError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        if "inadmissible parameters" in str(e):
            print(f"constraint error: {e}", file=sys.stderr)
            return 3
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except NonConvergenceError as e:
        print(f"non-convergence: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
