"""Command-line frontend.

Subcommands: gen-code, build-table, decode, dfr, almost-nc, counters-dist.
Machine-readable output goes to stdout (JSON with --json), progress and the
echoed resolved configuration go to stderr. Exit codes: 0 success, 1 decoding
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .code import ErrorVector, load_code, random_code, save_code, syndrome_bits
from .decoders import DecoderSpec, decode
from .exceptions import ConfigError
from .harness import ExperimentConfig, run_experiment
from .nc_table import NcSyndromeTable
from .rng import SplitMix64

EXIT_OK = 0
EXIT_DECODE_FAILURE = 1
EXIT_USAGE = 2


def _echo_config(doc: dict) -> None:
    print("resolved config: " + json.dumps(doc, sort_keys=True), file=sys.stderr)


def _parse_support_arg(value: str) -> list[int]:
    """Sorted support list, given inline ('3,17,40') or as '@file'."""
    if value.startswith("@"):
        with open(value[1:], "r", encoding="utf-8") as fh:
            value = fh.read()
    items = [tok for tok in value.replace("\n", ",").replace(" ", ",").split(",") if tok]
    try:
        return [int(tok) for tok in items]
    except ValueError as exc:
        raise ConfigError(f"support list contains a non-integer token: {exc}")


def _cmd_gen_code(args) -> int:
    code = random_code(args.r, args.v, args.seed)
    save_code(code, args.out)
    _echo_config({"command": "gen-code", "r": args.r, "v": args.v,
                  "seed": args.seed, "out": args.out})
    if args.json:
        print(json.dumps({"out": args.out, "r": args.r, "v": args.v}))
    else:
        print(f"wrote code (r={args.r}, v={args.v}) to {args.out}")
    return EXIT_OK


def _cmd_build_table(args) -> int:
    code = load_code(args.code)
    table = NcSyndromeTable.build(code)
    table.save(args.out)
    _echo_config({"command": "build-table", "code": args.code, "out": args.out})
    if args.json:
        print(json.dumps({"out": args.out, "entries": len(table)}))
    else:
        print(f"wrote {len(table)}-entry table to {args.out}")
    return EXIT_OK


def _build_decoder_spec(args) -> DecoderSpec:
    thresholds = tuple(_parse_support_arg(args.thresholds)) if args.thresholds else None
    affine = None
    if args.affine:
        parts = args.affine.split(",")
        if len(parts) != 3:
            raise ConfigError("--affine expects 'a,b,min_thr'")
        affine = (float(parts[0]), float(parts[1]), int(parts[2]))
    return DecoderSpec(
        variant=args.decoder,
        iter_max=args.iter_max,
        thresholds=thresholds,
        affine=affine,
        nc_aware=args.nc_aware,
        check_before_first_iter=args.check_first,
    )


def _cmd_decode(args) -> int:
    code = load_code(args.code)
    if (args.error is None) == (args.syndrome is None):
        raise ConfigError("provide exactly one of --error / --syndrome")
    spec = _build_decoder_spec(args)
    if args.error is not None:
        e = ErrorVector.from_support(code.r, _parse_support_arg(args.error))
        s0 = syndrome_bits(code, e)
        weight = e.weight
    else:
        support = _parse_support_arg(args.syndrome)
        bad = [p for p in support if not 0 <= p < code.r]
        if bad:
            raise ConfigError(f"syndrome support {bad} outside [0, {code.r})")
        s0 = np.zeros(code.r, dtype=np.uint8)
        s0[support] = 1
        weight = None
    if spec.iter_max is None:
        # Without an explicit budget, follow the 2t rule for bf-max when the
        # error weight is known; otherwise fall back to variant defaults.
        spec = spec.resolved(weight if weight is not None else code.v)

    table = None
    if spec.nc_aware:
        table = NcSyndromeTable.load(args.table) if args.table else NcSyndromeTable.build(code)

    _echo_config({
        "command": "decode", "code": args.code, "decoder": spec.variant,
        "iter_max": spec.iter_max, "nc_aware": spec.nc_aware, "seed": args.seed,
    })
    outcome = decode(code, s0, spec, SplitMix64(args.seed), table=table)
    doc = {
        "status": outcome.status.value,
        "iterations": outcome.iterations_used,
        "nc_hit": outcome.nc_table_hit,
        "nc_index": outcome.nc_index_hit,
        "estimate_support": list(outcome.estimate.support),
    }
    if args.json:
        print(json.dumps(doc))
    else:
        print(f"{doc['status']} after {doc['iterations']} iterations"
              + (f" (table hit at {doc['nc_index']})" if doc["nc_hit"] else ""))
        if outcome.success:
            print("estimate: " + ",".join(str(c) for c in outcome.estimate.support))
    return EXIT_OK if outcome.success else EXIT_DECODE_FAILURE


def _cmd_experiment(args, kind: str) -> int:
    config = ExperimentConfig.from_file(args.config)
    if config.experiment != kind:
        raise ConfigError(
            f"config file is a '{config.experiment}' experiment, expected '{kind}'"
        )
    if args.workers is not None:
        config = _replace_config(config, workers=args.workers)
    if args.out is not None:
        config = _replace_config(config, output=args.out)
    _echo_config(config.to_dict())

    interval = args.progress_every
    last_reported = {}

    def progress(info: dict) -> None:
        # the harness reports in block granularity; print whenever a point
        # crosses the next interval boundary
        key = (info.get("sweep_value"), info.get("decoder"), info.get("nc_aware"))
        count = info.get("trials", info.get("samples", 0))
        if count - last_reported.get(key, 0) >= interval:
            last_reported[key] = count
            print("progress: " + json.dumps(info, sort_keys=True), file=sys.stderr)

    results = run_experiment(config, progress if interval else None)
    if kind == "counter_dist":
        values, bad, susp = results
        if args.json:
            print(json.dumps({
                "values": [int(x) for x in values],
                "bad_frac": [float(x) for x in bad],
                "susp_frac": [float(x) for x in susp],
            }))
        else:
            print(f"histogram over {len(values)} counter values written"
                  + (f" to {config.output}" if config.output else ""))
    else:
        if args.json:
            print(json.dumps([
                {
                    "sweep": res.u if res.u is not None else res.t,
                    "decoder": res.decoder, "nc_aware": res.nc_aware,
                    "trials": res.trials, "failures": res.failures, "dfr": res.dfr,
                }
                for res in results
            ]))
        else:
            for res in results:
                sweep = res.u if res.u is not None else res.t
                print(f"{res.decoder} nc_aware={res.nc_aware} sweep={sweep}: "
                      f"{res.failures}/{res.trials} failures (dfr={res.dfr:.3g})")
    return EXIT_OK


def _replace_config(config: ExperimentConfig, **kwargs) -> ExperimentConfig:
    from dataclasses import replace

    return replace(config, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcbf",
        description="Bit-flipping decoding of double-circulant QC-MDPC codes "
                    "with near-codeword recovery",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-code", help="generate a random code file")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("build-table", help="build and save the near-codeword syndrome table")
    p.add_argument("--code", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("decode", help="decode one error or syndrome")
    p.add_argument("--code", required=True)
    p.add_argument("--error", help="error support, '1,5,9' or @file")
    p.add_argument("--syndrome", help="syndrome support, '0,4,7' or @file")
    p.add_argument("--decoder", default="bf-max",
                   choices=["bf-max", "mld", "oop-fixed", "oop-affine"])
    p.add_argument("--iter-max", type=int, dest="iter_max")
    p.add_argument("--thresholds", help="per-iteration thresholds for oop-fixed")
    p.add_argument("--affine", help="'a,b,min_thr' for oop-affine")
    p.add_argument("--nc-aware", action="store_true", dest="nc_aware")
    p.add_argument("--check-first", action="store_true", dest="check_first")
    p.add_argument("--table", help="table cache file (built on the fly if omitted)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")

    for name in ("dfr", "almost-nc", "counters-dist"):
        p = sub.add_parser(name, help=f"run a {name} experiment from a config file")
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="override the config's output path")
        p.add_argument("--workers", type=int,
                       default=_env_workers(), help="worker processes")
        p.add_argument("--progress-every", type=int, default=0, dest="progress_every")
        p.add_argument("--json", action="store_true")

    return parser


def _env_workers() -> int | None:
    raw = os.environ.get("QCBF_WORKERS")
    return int(raw) if raw else None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen-code":
            return _cmd_gen_code(args)
        if args.command == "build-table":
            return _cmd_build_table(args)
        if args.command == "decode":
            return _cmd_decode(args)
        kind = {
            "dfr": "dfr_sweep",
            "almost-nc": "almost_nc_sweep",
            "counters-dist": "counter_dist",
        }[args.command]
        return _cmd_experiment(args, kind)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
