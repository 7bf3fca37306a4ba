"""Command-line interface.

Subcommands cover channel capacity, transition-table export, DE thresholds
and erasure-threshold scans, Monte-Carlo simulation, and canned
reproduction runs. Every output file embeds the fully resolved
configuration and a version hash; scans checkpoint their progress and can
resume. Exit codes: 0 ok, 2 invalid configuration, 3 compute budget
exceeded (partial results are kept).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .batchdec import SyndromeLut
from .channel import (
    ChannelParams,
    capacity,
    capacity_optimal_threshold,
    db_to_lin,
    transition_probs,
)
from .config import ExperimentConfig, apply_overrides, config_from_kv
from .de import noise_threshold, t_opt_scan
from .distributions import weight_distribution
from .ioutil import read_csv_rows, write_csv, write_json_summary
from .montecarlo import SimConfig, estimate_ber, simulated_threshold
from .transitions import cached_table, default_cache_dir, export_table_csv

EXIT_BAD_CONFIG = 2
EXIT_BUDGET = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--out", default="results", help="output path prefix")
    p.add_argument("--cache-dir", default=None, help="transition-table cache directory")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")


def _add_code(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--code",
        nargs="+",
        default=None,
        metavar="TOKEN",
        help="component code descriptor, e.g. 'nu4 t2' or 'nu6-t3-even'",
    )
    p.add_argument("--weight-mode", dest="weight_mode", choices=["auto", "exact", "binomial"], default=None)


def parse_code_descriptor(tokens: list[str]) -> dict:
    """'nu6 t3 even' / 'nu6-t3-shortened-plain' -> {nu, t, variant} overrides."""
    parts: list[str] = []
    for tok in tokens:
        parts.extend(x for x in tok.replace("-", " ").split() if x)
    out: dict = {}
    variant_words: list[str] = []
    for part in parts:
        if part.startswith("nu") and part[2:].isdigit():
            out["nu"] = int(part[2:])
        elif part.startswith("t") and part[1:].isdigit():
            out["t"] = int(part[1:])
        elif part in ("plain", "even", "shortened"):
            variant_words.append(part)
        else:
            raise ValueError(f"bad code descriptor token {part!r}")
    if variant_words:
        if variant_words == ["shortened"]:
            variant_words.append("plain")
        out["variant"] = "-".join(variant_words)
    return out


def _build_config(args: argparse.Namespace, overrides: dict) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = config_from_kv(fh.read(), cfg)
    return apply_overrides(cfg, overrides)


def _config_overrides(args: argparse.Namespace) -> dict:
    keys = [f.name for f in ExperimentConfig.__dataclass_fields__.values()]
    out = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    if getattr(args, "code", None):
        out.update(parse_code_descriptor(args.code))
    return out


def _weight_tables(cfg: ExperimentConfig):
    mode = None if cfg.weight_mode == "auto" else cfg.weight_mode
    return weight_distribution(cfg.code_spec(), mode)


def _table(cfg: ExperimentConfig, cache_dir: str | None):
    return cached_table(
        cfg.code_spec(), _weight_tables(cfg), cfg.decoder, cache_dir or default_cache_dir()
    )


def cmd_capacity(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    params = ChannelParams(db_to_lin(cfg.esn0_db), cfg.t_quant)
    tri = transition_probs(params)
    cap = capacity(params)
    rows = [[cfg.esn0_db, cfg.t_quant, repr(tri.delta), repr(tri.eps), repr(cap)]]
    write_csv(args.out + "_capacity.csv", ["esn0_db", "T", "delta_c", "eps_c", "capacity"], rows, cfg.as_dict())
    print(f"esn0={cfg.esn0_db} dB T={cfg.t_quant}: delta={tri.delta:.6g} eps={tri.eps:.6g} C={cap:.6f}")
    return 0


def cmd_capacity_scan(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    rows = []
    for esn0_db in np.arange(cfg.esn0_db_min, cfg.esn0_db_max + 1e-9, args.esn0_db_step):
        lin = db_to_lin(float(esn0_db))
        for t in np.arange(cfg.t_min, cfg.t_max + 1e-9, cfg.t_step):
            tri = transition_probs(ChannelParams(lin, float(t)))
            cap = capacity(ChannelParams(lin, float(t)))
            rows.append([round(float(esn0_db), 10), round(float(t), 10),
                         repr(tri.delta), repr(tri.eps), repr(cap)])
        t_star, c_star = capacity_optimal_threshold(lin)
        rows.append([round(float(esn0_db), 10), "opt", repr(t_star), "", repr(c_star)])
    write_csv(args.out + "_capacity_scan.csv", ["esn0_db", "T", "delta_c", "eps_c", "capacity"], rows, cfg.as_dict())
    print(f"wrote {len(rows)} rows to {args.out}_capacity_scan.csv")
    return 0


def cmd_transition_table(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    table = _table(cfg, args.cache_dir)
    path = args.out + f"_ttable_{cfg.decoder}.csv"
    export_table_csv(table, path)
    print(f"wrote {table.n}x{table.d_des} table for {table.meta['code']} to {path}")
    return 0


def cmd_threshold(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    table = _table(cfg, args.cache_dir)
    res = noise_threshold(table, cfg.t_quant, cfg.de_params(), cfg.ensemble)
    write_json_summary(args.out + "_threshold.json", "threshold", cfg.as_dict(), res)
    print(f"threshold({cfg.ensemble}, {cfg.decoder}, T={cfg.t_quant}) = {res['esn0_star_db']:.4f} dB")
    return 0


def cmd_scan_t(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    table = _table(cfg, args.cache_dir)
    csv_path = args.out + "_scan_t.csv"
    precomputed: dict[float, float] = {}
    if args.resume and os.path.exists(csv_path):
        _, rows = read_csv_rows(csv_path)
        precomputed = {float(r[0]): float(r[1]) for r in rows}
        print(f"resuming with {len(precomputed)} checkpointed points")

    checkpoint: list[tuple[float, float]] = sorted(precomputed.items())

    def progress(t, thr):
        checkpoint.append((t, thr))
        write_csv(csv_path, ["T", "esn0_star_db"], sorted(checkpoint), cfg.as_dict())
        print(f"  T={t:.4f} threshold={thr:.5f} dB", flush=True)

    grid = np.round(np.arange(cfg.t_min, cfg.t_max + cfg.t_step / 2, cfg.t_step), 10)
    scan = t_opt_scan(
        table, grid, cfg.de_params(), cfg.ensemble,
        refine_tol=cfg.refine_tol, progress=progress, precomputed=precomputed,
    )
    write_csv(csv_path, ["T", "esn0_star_db"], scan["points"], cfg.as_dict())
    write_json_summary(
        args.out + "_scan_t.json", "scan-t", cfg.as_dict(),
        {k: scan[k] for k in ("t_opt", "gain_db", "threshold_at_0_db", "threshold_at_t_opt_db")},
    )
    print(f"T_opt={scan['t_opt']:.4f} gain={scan['gain_db']:.4f} dB")
    return 0


def _sim_config(cfg: ExperimentConfig) -> SimConfig:
    return SimConfig(
        spec=cfg.code_spec(),
        decoder=cfg.decoder,
        schedule=cfg.schedule,
        iterations=cfg.iterations,
        t_quant=cfg.t_quant,
        target_ber=cfg.target_ber,
        confidence=cfg.confidence,
        max_bits=cfg.max_bits,
        seed=cfg.seed,
        allzero=cfg.allzero,
        practical_final=cfg.practical_final,
        jobs=cfg.jobs,
    )


def cmd_simulate(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    sim = _sim_config(cfg)
    est = estimate_ber(sim, db_to_lin(cfg.esn0_db), cfg.esn0_db)
    rows = [[cfg.esn0_db, cfg.t_quant, cfg.iterations, est.frames, est.bit_errors,
             repr(est.ber), repr(est.ci_lo), repr(est.ci_hi)]]
    write_csv(args.out + "_simulate.csv",
              ["esn0_db", "T", "iters", "frames", "bit_errors", "ber", "ci_lo", "ci_hi"],
              rows, cfg.as_dict())
    print(f"BER({cfg.esn0_db} dB, T={cfg.t_quant}) = {est.ber:.4e} [{est.ci_lo:.3e}, {est.ci_hi:.3e}]")
    return 0 if est.separated else EXIT_BUDGET


def cmd_sim_threshold(args) -> int:
    cfg = _build_config(args, _config_overrides(args))
    sim = _sim_config(cfg)
    res = simulated_threshold(sim, (cfg.esn0_db_min, cfg.esn0_db_max), cfg.sim_tol_db)
    rows = [[cfg.t_quant, res["esn0_starstar_db"], res["interval_lo_db"], res["interval_hi_db"]]]
    write_csv(args.out + "_sim_threshold.csv",
              ["T", "esn0_starstar_db", "interval_lo", "interval_hi"], rows, cfg.as_dict())
    write_json_summary(args.out + "_sim_threshold.json", "sim-threshold", cfg.as_dict(),
                       {k: res[k] for k in ("esn0_starstar_db", "interval_lo_db", "interval_hi_db", "flagged")})
    print(f"simulated threshold T={cfg.t_quant}: {res['esn0_starstar_db']:.4f} dB "
          f"[{res['interval_lo_db']:.4f}, {res['interval_hi_db']:.4f}]")
    return EXIT_BUDGET if res["flagged"] else 0


def cmd_reproduce_fig3(args) -> int:
    ns = vars(args).copy()
    ns.update(nu=9, t=3, variant="plain", ensemble="product", bisect_db=2e-4,
              t_max=ns.get("t_max") or 0.12, resume=ns.get("resume", False))
    ns.setdefault("t_step", None)
    ns.setdefault("refine_tol", None)
    return cmd_scan_t(argparse.Namespace(**ns))


def cmd_reproduce_fig4a_point(args) -> int:
    ns = vars(args).copy()
    ns.update(nu=6, t=4, variant="shortened-plain", ensemble="staircase",
              decoder="eaed", bisect_db=2e-4, t_max=0.26, t_step=0.02,
              refine_tol=2e-3, resume=ns.get("resume", False))
    return cmd_scan_t(argparse.Namespace(**ns))


def cmd_reproduce_fig5(args) -> int:
    ns = vars(args).copy()
    if not ns.get("code"):
        # the full (511,484,3) run needs days of CPU on a desktop; the
        # (63,45,3) product code exhibits the same DE-vs-simulation gap
        ns["code"] = ["nu6", "t3"]
    cfg = _build_config(argparse.Namespace(**ns), _config_overrides(argparse.Namespace(**ns)))
    table = _table(cfg, args.cache_dir)
    de_thr = noise_threshold(table, cfg.t_quant, cfg.de_params(), "product")["esn0_star_db"]
    sim = _sim_config(cfg)
    res = simulated_threshold(sim, (de_thr, de_thr + 0.5), cfg.sim_tol_db)
    gap = res["esn0_starstar_db"] - de_thr
    write_json_summary(args.out + "_fig5_point.json", "reproduce-fig5", cfg.as_dict(),
                       {"de_threshold_db": de_thr, **{k: res[k] for k in ("esn0_starstar_db", "interval_lo_db", "interval_hi_db", "flagged")},
                        "gap_db": gap})
    print(f"T={cfg.t_quant}: DE {de_thr:.4f} dB, simulated {res['esn0_starstar_db']:.4f} dB, gap {gap:.4f} dB")
    return EXIT_BUDGET if res["flagged"] else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eepc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, code=True, **kw):
        p = sub.add_parser(name, **kw)
        _add_common(p)
        if code:
            _add_code(p)
        p.set_defaults(fn=fn)
        return p

    p = add("capacity", cmd_capacity, code=False, help="channel transition probabilities and capacity")
    p.add_argument("--esn0-db", dest="esn0_db", type=float, default=None)
    p.add_argument("--t-quant", "--t", dest="t_quant", type=float, default=None)

    p = add("capacity-scan", cmd_capacity_scan, code=False, help="capacity over an (Es/N0, T) grid")
    p.add_argument("--esn0-db-min", dest="esn0_db_min", type=float, default=None)
    p.add_argument("--esn0-db-max", dest="esn0_db_max", type=float, default=None)
    p.add_argument("--esn0-db-step", type=float, default=0.5)
    p.add_argument("--t-min", dest="t_min", type=float, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--t-step", dest="t_step", type=float, default=None)

    p = add("transition-table", cmd_transition_table, help="build and export a decoder transition table")
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)

    p = add("threshold", cmd_threshold, help="DE noise threshold at one T")
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)
    p.add_argument("--ensemble", choices=["product", "staircase"], default=None)
    p.add_argument("--t-quant", "--t", dest="t_quant", type=float, default=None)
    p.add_argument("--bisect-db", dest="bisect_db", type=float, default=None)

    p = add("scan-t", cmd_scan_t, help="threshold scan over T with refinement")
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)
    p.add_argument("--ensemble", choices=["product", "staircase"], default=None)
    p.add_argument("--t-min", dest="t_min", type=float, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--t-step", dest="t_step", type=float, default=None)
    p.add_argument("--steps", type=int, default=None, help="alternative to --t-step: number of grid steps")
    p.add_argument("--refine-tol", dest="refine_tol", type=float, default=None)
    p.add_argument("--bisect-db", dest="bisect_db", type=float, default=None)
    p.add_argument("--resume", action="store_true")

    p = add("simulate", cmd_simulate, help="Monte-Carlo BER at one channel point")
    p.add_argument("--esn0-db", dest="esn0_db", type=float, default=None)
    p.add_argument("--t-quant", "--t", dest="t_quant", type=float, default=None)
    p.add_argument("--schedule", choices=["emp", "imp"], default=None)
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)
    p.add_argument("--iters", dest="iterations", type=int, default=None)
    p.add_argument("--target-ber", dest="target_ber", type=float, default=None)
    p.add_argument("--max-bits", dest="max_bits", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = add("sim-threshold", cmd_sim_threshold, help="binary search the simulated BER threshold")
    p.add_argument("--esn0-db-min", dest="esn0_db_min", type=float, default=None)
    p.add_argument("--esn0-db-max", dest="esn0_db_max", type=float, default=None)
    p.add_argument("--t-quant", "--t", dest="t_quant", type=float, default=None)
    p.add_argument("--schedule", choices=["emp", "imp"], default=None)
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)
    p.add_argument("--sim-tol-db", dest="sim_tol_db", type=float, default=None)
    p.add_argument("--max-bits", dest="max_bits", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = add("reproduce-fig3", cmd_reproduce_fig3, code=False,
            help="DE threshold-vs-T scan of the (511,484,3) product code")
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--t-step", dest="t_step", type=float, default=None)

    p = add("reproduce-fig4a-point", cmd_reproduce_fig4a_point, code=False,
            help="staircase gain of the shortened (63,39,4) code")

    p = add("reproduce-fig5", cmd_reproduce_fig5,
            help="simulated vs DE threshold at one T (seeded)")
    p.add_argument("--decoder", choices=["eaed", "eaedplus"], default=None)
    p.add_argument("--schedule", choices=["emp", "imp"], default=None)
    p.add_argument("--t-quant", "--t", dest="t_quant", type=float, default=None)
    p.add_argument("--seed", type=int, required=True, help="mandatory in reproduce mode")
    p.add_argument("--max-bits", dest="max_bits", type=float, default=None)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.cache_dir is None:
        args.cache_dir = default_cache_dir()
    if getattr(args, "steps", None) and getattr(args, "t_step", None) is None:
        tmax = args.t_max if args.t_max is not None else ExperimentConfig().t_max
        tmin = args.t_min if args.t_min is not None else 0.0
        args.t_step = (tmax - tmin) / args.steps
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
