"""Monte Carlo experiment runner.

Three experiment kinds share one trial engine:

- ``dfr_sweep``: decoding failure rate versus error weight t, uniform errors.
- ``almost_nc_sweep``: failure probability versus the near-codeword overlap u
  at fixed t, errors drawn as (t, u)-almost near-codewords.
- ``counter_dist``: counter-value histograms of bad and suspicious bits over
  sampled almost near-codewords.

Every trial is seeded by hashing (master_seed, experiment, sweep value,
decoder identity, trial index), so results are byte-identical regardless of
worker count: workers only precompute blocks of trials, which the driver then
consumes strictly in trial order with the stopping rule applied trial by
trial. Decoder identity excludes near-codeword awareness, so a standard and a
table-aware decoder replay exactly the same error vectors.

A success returned by a decoder is always re-verified against the input
syndrome; a mismatch aborts the whole run since it can only be a decoder
defect, never a statistic.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as _beta

from .code import QcMdpcCode, counters as compute_counters, load_code, random_code, syndrome_bits
from .decoders import DecoderSpec, decode
from .error_models import classify_bits, intersection_profile, sample_almost_nc, sample_uniform_error
from .exceptions import ConfigError
from .nc_table import NcSyndromeTable
from .rng import SplitMix64, derive_trial_seeds

CSV_HEADER = [
    "experiment", "decoder", "nc_aware", "r", "v", "t", "u",
    "trials", "failures", "dfr", "ci_low", "ci_high", "nc_hits", "mean_iters", "seed",
]

HIST_HEADER = ["value", "bad_frac", "susp_frac"]

_BLOCK = 256

EXPERIMENT_KINDS = ("dfr_sweep", "almost_nc_sweep", "counter_dist")


def clopper_pearson(failures: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Exact (Clopper-Pearson) binomial confidence interval for failures/trials."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if not 0 <= failures <= trials:
        raise ConfigError(f"failures {failures} outside [0, {trials}]")
    alpha = 1.0 - level
    if failures == 0:
        low = 0.0
    else:
        low = float(_beta.ppf(alpha / 2, failures, trials - failures + 1))
    if failures == trials:
        high = 1.0
    else:
        high = float(_beta.ppf(1 - alpha / 2, failures + 1, trials - failures))
    return low, high


# A code source is either a json file path or random-key parameters
# (r, v, key_seed). Sweep configs may list several sources (e.g. one per
# circulant weight); each contributes its own group of CSV rows. Trial seeds
# do not depend on the source, so the curves of a multi-code sweep share
# common random numbers, which tightens visual comparisons between them.
CodeSource = str | tuple[int, int, int]


def _load_source(source: CodeSource) -> QcMdpcCode:
    if isinstance(source, str):
        return load_code(source)
    r, v, key_seed = source
    return random_code(r, v, key_seed)


def _source_to_doc(source: CodeSource) -> dict:
    if isinstance(source, str):
        return {"path": source}
    r, v, key_seed = source
    return {"r": r, "v": v, "key_seed": key_seed}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    code_sources: tuple[CodeSource, ...] = ()
    decoders: tuple[DecoderSpec, ...] = ()
    t_values: tuple[int, ...] = ()
    t: int | None = None
    u_values: tuple[int, ...] = ()
    u: int | None = None
    samples: int = 100
    min_failures: int | None = None
    max_trials: int | None = None
    strict_error_match: bool = False
    master_seed: int = 0
    output: str | None = None
    workers: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        return _parse_config(doc)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
        return _parse_config(doc)

    def to_dict(self) -> dict:
        doc: dict = {"experiment": self.experiment, "master_seed": self.master_seed,
                     "workers": self.workers}
        if len(self.code_sources) == 1:
            doc["code"] = _source_to_doc(self.code_sources[0])
        else:
            doc["codes"] = [_source_to_doc(s) for s in self.code_sources]
        if self.experiment != "counter_dist":
            doc["decoders"] = [_spec_to_dict(s) for s in self.decoders]
            doc["stop"] = {"min_failures": self.min_failures, "max_trials": self.max_trials}
            doc["strict_error_match"] = self.strict_error_match
        if self.experiment == "dfr_sweep":
            doc["t_values"] = list(self.t_values)
        elif self.experiment == "almost_nc_sweep":
            doc["t"] = self.t
            doc["u_values"] = list(self.u_values)
        else:
            doc["t"] = self.t
            doc["u"] = self.u
            doc["samples"] = self.samples
        if self.output is not None:
            doc["output"] = self.output
        return doc

    def load_code_object(self) -> QcMdpcCode:
        if len(self.code_sources) != 1:
            raise ConfigError("this experiment requires exactly one code source")
        return _load_source(self.code_sources[0])


def _want(doc, key, types, path, required=True, default=None):
    val = doc.get(key)
    if val is None:
        if required:
            raise ConfigError(f"{path}{key}: missing required field")
        return default
    if types is not None and not isinstance(val, types):
        raise ConfigError(f"{path}{key}: expected {_type_names(types)}, got {type(val).__name__}")
    if isinstance(val, bool) and types is int:
        raise ConfigError(f"{path}{key}: expected int, got bool")
    return val


def _type_names(types) -> str:
    if isinstance(types, tuple):
        return " or ".join(t.__name__ for t in types)
    return types.__name__


def _parse_decoder(doc: dict, path: str) -> DecoderSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: decoder entry must be an object")
    variant = _want(doc, "variant", str, path + ".")
    iter_max = _want(doc, "iter_max", int, path + ".", required=False)
    thresholds = _want(doc, "thresholds", list, path + ".", required=False)
    affine_doc = _want(doc, "affine", (dict, list), path + ".", required=False)
    affine = None
    if affine_doc is not None:
        if isinstance(affine_doc, dict):
            try:
                affine = (affine_doc["a"], affine_doc["b"], affine_doc["min_thr"])
            except KeyError as exc:
                raise ConfigError(f"{path}.affine: missing key {exc}")
        else:
            if len(affine_doc) != 3:
                raise ConfigError(f"{path}.affine: expected [a, b, min_thr]")
            affine = tuple(affine_doc)
    try:
        return DecoderSpec(
            variant=variant,
            iter_max=iter_max,
            thresholds=tuple(thresholds) if thresholds is not None else None,
            affine=affine,
            nc_aware=bool(doc.get("nc_aware", False)),
            check_before_first_iter=bool(doc.get("check_before_first_iter", False)),
            name=doc.get("name"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}")


def _parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    kind = _want(doc, "experiment", str, "")
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"experiment: unknown kind '{kind}' (expected one of {EXPERIMENT_KINDS})")

    if "codes" in doc:
        codes_doc = _want(doc, "codes", list, "")
        if not codes_doc:
            raise ConfigError("codes: must be a non-empty list")
        sources = tuple(
            _parse_code_source(entry, f"codes[{i}].") for i, entry in enumerate(codes_doc)
        )
    else:
        sources = (_parse_code_source(_want(doc, "code", dict, ""), "code."),)
    if kind == "counter_dist" and len(sources) != 1:
        raise ConfigError("counter_dist takes exactly one code source")

    kwargs: dict = {
        "experiment": kind,
        "code_sources": sources,
        "master_seed": _want(doc, "master_seed", int, "", required=False, default=0),
        "output": _want(doc, "output", str, "", required=False),
        "workers": _want(doc, "workers", int, "", required=False, default=1),
    }
    if kwargs["workers"] < 1:
        raise ConfigError("workers: must be >= 1")

    if kind == "counter_dist":
        kwargs["t"] = _want(doc, "t", int, "")
        kwargs["u"] = _want(doc, "u", int, "")
        kwargs["samples"] = _want(doc, "samples", int, "", required=False, default=100)
        if kwargs["samples"] < 1:
            raise ConfigError("samples: must be >= 1")
        return ExperimentConfig(**kwargs)

    decoders_doc = _want(doc, "decoders", list, "")
    if not decoders_doc:
        raise ConfigError("decoders: at least one decoder required")
    kwargs["decoders"] = tuple(
        _parse_decoder(d, f"decoders[{i}]") for i, d in enumerate(decoders_doc)
    )

    stop = _want(doc, "stop", dict, "", required=False)
    if stop is None:
        # desk-scale default: stop after 30 failures, hard cap at 10^7 trials
        min_failures, max_trials = 30, 10_000_000
    else:
        min_failures = _want(stop, "min_failures", int, "stop.", required=False)
        max_trials = _want(stop, "max_trials", int, "stop.", required=False)
        if min_failures is None and max_trials is None:
            raise ConfigError("stop: at least one of min_failures / max_trials must be set")
    for label, val in (("min_failures", min_failures), ("max_trials", max_trials)):
        if val is not None and val < 1:
            raise ConfigError(f"stop.{label}: must be >= 1")
    kwargs["min_failures"] = min_failures
    kwargs["max_trials"] = max_trials
    kwargs["strict_error_match"] = bool(doc.get("strict_error_match", False))

    if kind == "dfr_sweep":
        t_values = _want(doc, "t_values", list, "")
        if not t_values or any(not isinstance(x, int) or x < 0 for x in t_values):
            raise ConfigError("t_values: must be a non-empty list of non-negative ints")
        kwargs["t_values"] = tuple(t_values)
    else:
        kwargs["t"] = _want(doc, "t", int, "")
        u_values = _want(doc, "u_values", list, "")
        if not u_values or any(not isinstance(x, int) or x < 1 for x in u_values):
            raise ConfigError("u_values: must be a non-empty list of positive ints")
        kwargs["u_values"] = tuple(u_values)
    return ExperimentConfig(**kwargs)


def _parse_code_source(entry, path: str) -> CodeSource:
    if not isinstance(entry, dict):
        raise ConfigError(f"{path.rstrip('.')}: code source must be an object")
    if "path" in entry:
        return _want(entry, "path", str, path)
    return (
        _want(entry, "r", int, path),
        _want(entry, "v", int, path),
        _want(entry, "key_seed", int, path),
    )


def _spec_to_dict(spec: DecoderSpec) -> dict:
    doc: dict = {"variant": spec.variant, "nc_aware": spec.nc_aware}
    if spec.iter_max is not None:
        doc["iter_max"] = spec.iter_max
    if spec.thresholds is not None:
        doc["thresholds"] = list(spec.thresholds)
    if spec.affine is not None:
        a, b, mt = spec.affine
        doc["affine"] = {"a": a, "b": b, "min_thr": mt}
    if spec.check_before_first_iter:
        doc["check_before_first_iter"] = True
    if spec.name:
        doc["name"] = spec.name
    return doc


@dataclass(frozen=True)
class SweepPointResult:
    experiment: str
    decoder: str
    nc_aware: bool
    r: int
    v: int
    t: int
    u: int | None
    trials: int
    failures: int
    nc_hits: int
    mean_iters: float
    seed: int

    @property
    def dfr(self) -> float:
        return self.failures / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return clopper_pearson(self.failures, self.trials)

    def csv_row(self) -> list[str]:
        lo, hi = self.ci
        return [
            self.experiment, self.decoder, "true" if self.nc_aware else "false",
            str(self.r), str(self.v), str(self.t),
            "" if self.u is None else str(self.u),
            str(self.trials), str(self.failures),
            _fmt(self.dfr), _fmt(lo), _fmt(hi),
            str(self.nc_hits), _fmt(self.mean_iters), str(self.seed),
        ]


def _fmt(x: float) -> str:
    return f"{x:.10g}"


# ---------------------------------------------------------------------------
# Trial engine. One context object holds everything a trial needs; workers
# rebuild it from a plain dict so the pool only ever pickles primitives.
# ---------------------------------------------------------------------------


@dataclass
class _RunContext:
    kind: str
    code: QcMdpcCode
    specs: tuple[DecoderSpec, ...]
    table: NcSyndromeTable | None
    master_seed: int
    strict: bool
    fixed_t: int | None

    @classmethod
    def from_config(cls, config: ExperimentConfig, source_index: int = 0) -> "_RunContext":
        code = _load_source(config.code_sources[source_index])
        table = (
            NcSyndromeTable.build(code)
            if any(s.nc_aware for s in config.decoders)
            else None
        )
        return cls(
            kind=config.experiment,
            code=code,
            specs=config.decoders,
            table=table,
            master_seed=config.master_seed,
            strict=config.strict_error_match,
            fixed_t=config.t,
        )

    def to_doc(self) -> dict:
        return {
            "kind": self.kind,
            "r": self.code.r,
            "v": self.code.v,
            "h1": list(self.code.h1.support),
            "h2": list(self.code.h2.support),
            "specs": [_spec_to_dict(s) for s in self.specs],
            "master_seed": self.master_seed,
            "strict": self.strict,
            "fixed_t": self.fixed_t,
            "need_table": self.table is not None,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "_RunContext":
        from .ring import CirculantPoly

        code = QcMdpcCode(
            doc["r"], doc["v"],
            CirculantPoly(doc["r"], tuple(doc["h1"])),
            CirculantPoly(doc["r"], tuple(doc["h2"])),
        )
        specs = tuple(_parse_decoder(d, f"specs[{i}]") for i, d in enumerate(doc["specs"]))
        table = NcSyndromeTable.build(code) if doc["need_table"] else None
        return cls(doc["kind"], code, specs, table, doc["master_seed"], doc["strict"], doc["fixed_t"])

    def run_trial(self, sweep_value: int, spec_idx: int, trial_index: int):
        """Returns (failed, iterations, nc_hit) for one seeded trial."""
        code = self.code
        spec = self.specs[spec_idx]
        if self.kind == "dfr_sweep":
            t = sweep_value
        else:
            t = self.fixed_t
        spec = spec.resolved(t)
        sample_seed, decode_seed = derive_trial_seeds(
            self.master_seed, self.kind, sweep_value, spec.base_id(), trial_index
        )
        sampler = SplitMix64(sample_seed)
        if self.kind == "dfr_sweep":
            e = sample_uniform_error(code.r, t, sampler)
        else:
            e = sample_almost_nc(code, t, sweep_value, sampler)
        s0 = syndrome_bits(code, e)
        out = decode(
            code, s0, spec, SplitMix64(decode_seed),
            table=self.table if spec.nc_aware else None,
        )
        if out.success:
            if not np.array_equal(syndrome_bits(code, out.estimate), s0):
                raise RuntimeError(
                    "decoder returned success with an estimate that does not "
                    f"reproduce the syndrome (trial {trial_index}, decoder "
                    f"{spec.label()}); aborting the run"
                )
            failed = self.strict and out.estimate.support != e.support
        else:
            failed = True
        return failed, out.iterations_used, out.nc_table_hit


_WORKER_CTX: _RunContext | None = None


def _worker_init(ctx_doc: dict) -> None:
    global _WORKER_CTX
    _WORKER_CTX = _RunContext.from_doc(ctx_doc)


def _worker_block(args) -> list:
    sweep_value, spec_idx, start, count = args
    ctx = _WORKER_CTX
    return [ctx.run_trial(sweep_value, spec_idx, start + i) for i in range(count)]


def _trial_stream(ctx, pool, workers, sweep_value, spec_idx, max_trials):
    """Yield per-trial outcomes in strict trial order."""
    if pool is None:
        idx = 0
        while max_trials is None or idx < max_trials:
            yield ctx.run_trial(sweep_value, spec_idx, idx)
            idx += 1
        return

    window = 2 * workers
    pending: dict[int, object] = {}
    next_submit = 0
    block = 0

    def blocks_left(b):
        return max_trials is None or b * _BLOCK < max_trials

    def submit():
        nonlocal next_submit
        while len(pending) < window and blocks_left(next_submit):
            start = next_submit * _BLOCK
            count = _BLOCK
            if max_trials is not None:
                count = min(count, max_trials - start)
            pending[next_submit] = pool.submit(
                _worker_block, (sweep_value, spec_idx, start, count)
            )
            next_submit += 1

    submit()
    while pending:
        fut = pending.pop(block)
        for outcome in fut.result():
            yield outcome
        block += 1
        submit()


def _run_point(ctx, pool, workers, config, sweep_value, spec_idx, progress):
    spec = ctx.specs[spec_idx]
    trials = failures = nc_hits = 0
    iter_sum = 0
    stream = _trial_stream(ctx, pool, workers, sweep_value, spec_idx, config.max_trials)
    for failed, iters, nc_hit in stream:
        trials += 1
        failures += int(failed)
        nc_hits += int(nc_hit)
        iter_sum += iters
        if progress is not None and trials % _BLOCK == 0:
            progress({
                "sweep_value": sweep_value, "decoder": spec.label(),
                "nc_aware": spec.nc_aware, "trials": trials, "failures": failures,
            })
        if config.min_failures is not None and failures >= config.min_failures:
            break
        if config.max_trials is not None and trials >= config.max_trials:
            break
    stream.close()
    t = sweep_value if ctx.kind == "dfr_sweep" else ctx.fixed_t
    u = None if ctx.kind == "dfr_sweep" else sweep_value
    return SweepPointResult(
        experiment=ctx.kind, decoder=spec.label(), nc_aware=spec.nc_aware,
        r=ctx.code.r, v=ctx.code.v, t=t, u=u,
        trials=trials, failures=failures, nc_hits=nc_hits,
        mean_iters=iter_sum / trials if trials else 0.0,
        seed=ctx.master_seed,
    )


def _run_sweep(config: ExperimentConfig, progress=None) -> list[SweepPointResult]:
    sweep_values = config.t_values if config.experiment == "dfr_sweep" else config.u_values
    results = []
    for source_index in range(len(config.code_sources)):
        ctx = _RunContext.from_config(config, source_index)
        pool = None
        try:
            if config.workers > 1:
                pool = ProcessPoolExecutor(
                    max_workers=config.workers,
                    initializer=_worker_init,
                    initargs=(ctx.to_doc(),),
                )
            for sweep_value in sweep_values:
                for spec_idx in range(len(ctx.specs)):
                    results.append(
                        _run_point(ctx, pool, config.workers, config,
                                   sweep_value, spec_idx, progress)
                    )
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    if config.output:
        write_results_csv(config.output, results)
        _write_sidecar(config)
    return results


def run_dfr_sweep(config: ExperimentConfig, progress=None) -> list[SweepPointResult]:
    if config.experiment != "dfr_sweep":
        raise ConfigError(f"expected dfr_sweep config, got {config.experiment}")
    return _run_sweep(config, progress)


def run_almost_nc_sweep(config: ExperimentConfig, progress=None) -> list[SweepPointResult]:
    if config.experiment != "almost_nc_sweep":
        raise ConfigError(f"expected almost_nc_sweep config, got {config.experiment}")
    return _run_sweep(config, progress)


def run_counter_dist(config: ExperimentConfig, progress=None):
    """Histogram of counter values over bad and suspicious bits.

    Returns (values, bad_frac, susp_frac); each fraction vector sums to 1.
    """
    if config.experiment != "counter_dist":
        raise ConfigError(f"expected counter_dist config, got {config.experiment}")
    code = config.load_code_object()
    t, u = config.t, config.u
    bad_counts = np.zeros(code.v + 1, dtype=np.int64)
    susp_counts = np.zeros(code.v + 1, dtype=np.int64)
    for idx in range(config.samples):
        sample_seed, _ = derive_trial_seeds(
            config.master_seed, config.experiment, f"{t}:{u}", "sampler", idx
        )
        e = sample_almost_nc(code, t, u, SplitMix64(sample_seed))
        profile = intersection_profile(code, e)
        marks = classify_bits(code, e, profile)
        sigma = compute_counters(code, syndrome_bits(code, e))
        bad_counts += np.bincount(sigma[list(marks.bad_bits)], minlength=code.v + 1)
        susp_counts += np.bincount(sigma[list(marks.suspicious_bits)], minlength=code.v + 1)
        if progress is not None and (idx + 1) % 10 == 0:
            progress({"samples": idx + 1})
    bad_frac = bad_counts / max(1, bad_counts.sum())
    susp_frac = susp_counts / max(1, susp_counts.sum())
    values = np.arange(code.v + 1)
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(HIST_HEADER)
            for val in values:
                writer.writerow([str(val), _fmt(bad_frac[val]), _fmt(susp_frac[val])])
        _write_sidecar(config)
    return values, bad_frac, susp_frac


def run_experiment(config: ExperimentConfig, progress=None):
    if config.experiment == "dfr_sweep":
        return run_dfr_sweep(config, progress)
    if config.experiment == "almost_nc_sweep":
        return run_almost_nc_sweep(config, progress)
    return run_counter_dist(config, progress)


def write_results_csv(path, results: list[SweepPointResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for res in results:
            writer.writerow(res.csv_row())


def _write_sidecar(config: ExperimentConfig) -> None:
    sidecar = os.fspath(config.output) + ".json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
