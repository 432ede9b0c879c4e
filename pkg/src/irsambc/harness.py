"""Experiment orchestration: seeding, execution, aggregation, CSV emission.

Every (realization, stream) pair gets its own generator derived from the
master seed by a counter-based split, so the channel draws for realization r
never depend on which methods are enabled or which sweep value is being run.
That makes comparisons paired across methods and sweep values, and makes a
sweep point with the default settings bit-identical to the corresponding
main-run point.

The summary file is recomputed from the written raw file, not from in-memory
values, so the aggregation is reproducible from the raw artifact alone.
"""
import csv
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .agent import run_episode
from .benchmarks import BENCHMARK_METHODS, evaluate_benchmarks
from .channel import generate_realization
from .config import (DRL_METHOD, ddpg_settings, node_geometry, save_config,
                     system_parameters, training_schedule)
from .errors import InvalidInputError

logger = logging.getLogger("irsambc")

METHOD_ORDER = (DRL_METHOD,) + BENCHMARK_METHODS
CHANNEL_STREAM = 0
AGENT_STREAM = 1
BENCHMARK_STREAM = 2

UNITS_COMMENT = ("# units: grcd is a dimensionless power ratio >= 1; "
                 "ber is a probability; seconds is wall-clock time")


def realization_rng(master_seed, n, realization, stream):
    """Independent generator for one (realization, stream) pair."""
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, n, realization, stream]))


@dataclass
class ExperimentRun:
    """Paths and parsed content of one emitted experiment."""

    raw_path: str
    summary_path: str
    rows: list
    summary: list
    failures: list = field(default_factory=list)
    trace_paths: list = field(default_factory=list)


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path, columns, rows, comment=UNITS_COMMENT):
    with open(path, "w", newline="") as fh:
        fh.write(comment + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(c)) for c in columns])


def load_rows(path):
    """Rows of a CSV written by write_csv, as dicts of strings."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return [dict(zip(header, row)) for row in reader]


def _validate_methods(methods):
    allowed = set(METHOD_ORDER)
    unknown = [m for m in methods if m not in allowed]
    if unknown:
        raise InvalidInputError(f"unknown methods {unknown}")
    if not methods:
        raise InvalidInputError("no methods enabled")
    return [m for m in METHOD_ORDER if m in methods]


def _realization_task(config, n, realization, methods, l_t, t_random, record_trace):
    """All enabled methods on one channel realization; returns row dicts."""
    geometry = node_geometry(config)
    params = system_parameters(config, l_t=l_t)
    master = config.run.master_seed
    channel_rng = realization_rng(master, n, realization, CHANNEL_STREAM)
    ch = generate_realization(geometry, config.system.m, n,
                              config.system.rician_k, channel_rng)
    rows = []
    failures = []
    trace = None

    if DRL_METHOD in methods:
        schedule = training_schedule(config, t_random=t_random)
        settings = ddpg_settings(config)
        agent_rng = realization_rng(master, n, realization, AGENT_STREAM)
        start = time.perf_counter()
        try:
            result = run_episode(ch, params, schedule, settings, agent_rng,
                                 record_true=record_trace)
        except Exception as exc:
            failures.append((n, realization, DRL_METHOD, repr(exc)))
        else:
            rows.append({
                "realization": realization, "method": DRL_METHOD,
                "grcd_true": result.grcd_true, "grcd_sample": result.grcd_sample,
                "ber": result.ber, "seconds": time.perf_counter() - start,
            })
            if record_trace:
                trace = dict(result.trace)
                trace["realization"] = realization

    bench = [m for m in methods if m != DRL_METHOD]
    if bench:
        bench_rng = realization_rng(master, n, realization, BENCHMARK_STREAM)
        try:
            results = evaluate_benchmarks(
                ch, params, bench_rng, methods=tuple(bench),
                restarts=config.benchmarks.restarts,
                iterations=config.benchmarks.iterations)
        except Exception as exc:
            for m in bench:
                failures.append((n, realization, m, repr(exc)))
        else:
            for res in results:
                rows.append({
                    "realization": realization, "method": res.method,
                    "grcd_true": res.grcd, "grcd_sample": None,
                    "ber": res.ber, "seconds": res.seconds,
                })
    return rows, trace, failures


def _run_tasks(config, tasks):
    """tasks: list of (point value, kwargs for _realization_task)."""
    workers = config.run.workers
    outputs = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(value, pool.submit(_realization_task, config, **kw))
                       for value, kw in tasks]
            for value, fut in futures:
                outputs.append((value, fut.result()))
    else:
        for value, kw in tasks:
            outputs.append((value, _realization_task(config, **kw)))
    return outputs


def aggregate_summary(raw_rows, sweep_field):
    """Per-(point, method) medians from parsed raw rows."""
    groups = {}
    for row in raw_rows:
        key = (float(row[sweep_field]), row["method"])
        groups.setdefault(key, []).append(row)
    summary = []
    for value, method in sorted(groups, key=lambda k: (k[0], METHOD_ORDER.index(k[1]))):
        items = groups[(value, method)]
        grcds = [float(r["grcd_true"]) for r in items]
        bers = [float(r["ber"]) for r in items]
        summary.append({
            sweep_field: int(value) if value == int(value) else value,
            "method": method,
            "realizations": len(items),
            "median_grcd": float(np.median(grcds)),
            "median_ber": float(np.median(bers)),
        })
    return summary


def _write_trace(out_dir, sweep_field, value, realization, trace):
    path = os.path.join(out_dir, f"trace_{sweep_field}_{value}_r{realization}.csv")
    columns = ["step", "reward", "sample_grcd", "true_grcd"]
    rows = [{c: trace[c][i] for c in columns} for i in range(len(trace["step"]))]
    write_csv(path, columns, rows,
              comment="# per-step training trace; true_grcd is ground truth "
                      "computed by the harness, not visible to the agent")
    return path


def _emit(config, out_dir, sweep_field, outputs):
    os.makedirs(out_dir, exist_ok=True)
    raw_rows = []
    failures = []
    trace_paths = []
    for value, (rows, trace, fails) in outputs:
        for row in rows:
            raw_rows.append({sweep_field: value, **row})
        failures.extend(fails)
        if trace is not None:
            trace_dir = os.path.join(out_dir, "traces")
            os.makedirs(trace_dir, exist_ok=True)
            trace_paths.append(_write_trace(trace_dir, sweep_field, value,
                                            trace.pop("realization"), trace))
    raw_rows.sort(key=lambda r: (r[sweep_field], r["realization"],
                                 METHOD_ORDER.index(r["method"])))
    raw_path = os.path.join(out_dir, "raw.csv")
    columns = [sweep_field, "realization", "method",
               "grcd_true", "grcd_sample", "ber", "seconds"]
    write_csv(raw_path, columns, raw_rows)

    parsed = load_rows(raw_path)
    summary = aggregate_summary(parsed, sweep_field)
    summary_path = os.path.join(out_dir, "summary.csv")
    summary_columns = [sweep_field, "method", "realizations",
                       "median_grcd", "median_ber"]
    write_csv(summary_path, summary_columns, summary)
    save_config(config, os.path.join(out_dir, "config.yaml"))

    for n, realization, method, message in failures:
        logger.warning("failed %s at %s=%s realization %s: %s",
                       method, sweep_field, n, realization, message)
    if failures:
        logger.warning("%d episode failures excluded from the summary", len(failures))
    return ExperimentRun(raw_path=raw_path, summary_path=summary_path,
                         rows=parsed, summary=summary, failures=failures,
                         trace_paths=trace_paths)


def run_experiment(config, out_dir=None):
    """Every enabled method on every (N, realization) pair, plus CSVs."""
    methods = _validate_methods(config.run.methods)
    out = out_dir or config.run.out_dir
    tasks = []
    for n in config.system.n_values:
        for r in range(config.run.realizations):
            tasks.append((n, dict(n=n, realization=r, methods=methods,
                                  l_t=None, t_random=None,
                                  record_trace=config.run.save_traces)))
    logger.info("running %d realizations x %d N values, methods %s",
                config.run.realizations, len(config.system.n_values), methods)
    outputs = _run_tasks(config, tasks)
    return _emit(config, out, "n", outputs)


def sweep_lt(config, values, n=64, out_dir=None):
    """Median GRCD of the learned solution versus training symbol length."""
    if not values:
        raise InvalidInputError("no sweep values given")
    out = out_dir or config.run.out_dir
    tasks = []
    for value in values:
        if value < 2:
            raise InvalidInputError(f"training length must be >= 2, got {value}")
        for r in range(config.run.realizations):
            tasks.append((value, dict(n=n, realization=r, methods=[DRL_METHOD],
                                      l_t=int(value), t_random=None,
                                      record_trace=config.run.save_traces)))
    logger.info("sweeping l_t over %s at n=%d", list(values), n)
    outputs = _run_tasks(config, tasks)
    return _emit(config, out, "l_t", outputs)


def sweep_t1(config, values, n=64, out_dir=None):
    """Median GRCD of the learned solution versus random-phase steps."""
    if not values:
        raise InvalidInputError("no sweep values given")
    out = out_dir or config.run.out_dir
    tasks = []
    for value in values:
        if value < 0:
            raise InvalidInputError(f"random phase count must be >= 0, got {value}")
        for r in range(config.run.realizations):
            tasks.append((value, dict(n=n, realization=r, methods=[DRL_METHOD],
                                      l_t=None, t_random=int(value),
                                      record_trace=config.run.save_traces)))
    logger.info("sweeping t_1 over %s at n=%d", list(values), n)
    outputs = _run_tasks(config, tasks)
    return _emit(config, out, "t_1", outputs)
