"""Monte Carlo engine for size and power studies.

Every replicate draws from streams keyed by ``(seed, scenario, replicate)``
so results do not depend on how replicates are spread over workers.
BLAS is pinned to one thread inside each replicate for the same reason.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from threadpoolctl import threadpool_limits

from . import simgen, targets
from .dataio import ExperimentRecord, format_float, save_results
from .errors import ConfigError, DegenerateVarianceError
from .meantests import TwoSampleInput, test_bs, test_one_sample, test_two_sample
from .numeric import RngStream
from .variance import min_sample_size

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
STATISTICS = ("T_new", "T_BS")
_DATA1, _DATA2, _MEAN = 0, 1, 2


@lru_cache(maxsize=32)
def _custom_spec(items):
    s = dict(items)
    missing = {"p", "M", "phi1", "phi2", "w"} - set(s)
    if missing:
        raise ConfigError(f"explicit spec lacks {sorted(missing)}")
    return simgen.make_spec(
        int(s["p"]), int(s["M"]), float(s["phi1"]), float(s["phi2"]), float(s["w"]),
        s.get("variant", "reciprocal-h"), s.get("mixing_w"), s.get("m"),
    )


@dataclass(frozen=True)
class Scenario:
    """One simulation cell.

    ``model`` names a catalog model; alternatively ``spec`` holds explicit
    parameters ``p, M, phi1, phi2, w`` and optionally ``variant``, ``m``,
    ``mixing_w``.  ``M`` is the true order for the two-sample design and
    ``m_order`` the order used by the test.
    """

    id: str
    n: int
    m_order: int
    kind: str = "one-sample"
    model: str | None = None
    spec: dict | None = None
    M: int | None = None
    mean: str = "null"
    alpha: float = 0.05
    replicates: int = 1000
    statistics: tuple = ("T_new",)

    @property
    def domain(self):
        return zlib.crc32(self.id.encode()) << 2

    def processes(self):
        if self.kind == "two-sample":
            return simgen.two_sample_specs(self.M, self.n)
        if self.spec is not None:
            return (_custom_spec(tuple(sorted(self.spec.items()))),)
        return (simgen.model_spec(self.model, self.n),)

    def validate(self):
        if not self.id:
            raise ConfigError("scenario id must be non-empty")
        if self.replicates < 1:
            raise ConfigError(f"{self.id}: replicates must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"{self.id}: alpha must lie in (0, 1)")
        if self.m_order < 0:
            raise ConfigError(f"{self.id}: m_order must be >= 0")
        if self.n < min_sample_size(self.m_order):
            raise ConfigError(
                f"{self.id}: n={self.n} too small for specified M={self.m_order}; "
                f"need n >= {min_sample_size(self.m_order)}"
            )
        bad = set(self.statistics) - set(STATISTICS)
        if bad or not self.statistics:
            raise ConfigError(f"{self.id}: unknown statistics {sorted(bad)}")
        if self.kind == "two-sample":
            if self.M is None or self.M < 0:
                raise ConfigError(f"{self.id}: two-sample scenarios need the true order M")
            if self.mean not in ("null", "two-sample-1", "two-sample-2"):
                raise ConfigError(f"{self.id}: mean scenario {self.mean!r} invalid for two samples")
            if "T_BS" in self.statistics:
                raise ConfigError(f"{self.id}: T_BS is a one-sample statistic")
        elif self.kind == "one-sample":
            if self.model is None and self.spec is None:
                raise ConfigError(f"{self.id}: give a catalog model or an explicit spec")
            if self.model is not None and self.model not in simgen.CATALOG:
                raise ConfigError(f"{self.id}: unknown model {self.model!r}")
            if self.mean not in ("null", "power1", "power2"):
                raise ConfigError(f"{self.id}: mean scenario {self.mean!r} invalid for one sample")
        else:
            raise ConfigError(f"{self.id}: unknown kind {self.kind!r}")
        try:
            self.processes()
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{self.id}: cannot build process: {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    scenarios: tuple
    seed: int
    results_path: str | None = None
    summary_path: str | None = None

    def validate(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an integer in [0, 2^64)")
        if not self.scenarios:
            raise ConfigError("config lists no scenarios")
        ids = [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ConfigError("scenario ids must be unique")
        for s in self.scenarios:
            s.validate()


_SCENARIO_KEYS = {f for f in Scenario.__dataclass_fields__}


def config_from_dict(data):
    """Build an :class:`ExperimentConfig` from its JSON form.

    Top-level ``alpha``, ``replicates`` and ``statistics`` act as defaults
    for scenarios that omit them.
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    if "seed" not in data:
        raise ConfigError("config needs a seed")
    defaults = {k: data[k] for k in ("alpha", "replicates", "statistics") if k in data}
    scenarios = []
    for raw in data.get("scenarios", []):
        entry = {**defaults, **raw}
        unknown = set(entry) - _SCENARIO_KEYS
        if unknown:
            raise ConfigError(f"unknown scenario fields {sorted(unknown)}")
        if "statistics" in entry:
            entry["statistics"] = tuple(entry["statistics"])
        try:
            scenarios.append(Scenario(**entry))
        except TypeError as exc:
            raise ConfigError(f"bad scenario {raw!r}: {exc}") from exc
    output = data.get("output", {})
    config = ExperimentConfig(
        scenarios=tuple(scenarios),
        seed=data["seed"],
        results_path=output.get("results"),
        summary_path=output.get("summary"),
    )
    config.validate()
    return config


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def _run_statistic(name, scenario, data):
    if name == "T_BS":
        return test_bs(data, scenario.alpha)
    if scenario.kind == "two-sample":
        return test_two_sample(TwoSampleInput(data[0], data[1], scenario.m_order), scenario.alpha)
    return test_one_sample(data, scenario.m_order, scenario.alpha)


def run_replicate(scenario, seed, r):
    """Simulate replicate ``r`` and apply every requested statistic.

    Returns a list of ``(statistic, value, p_value, reject)``; a replicate
    whose variance estimate is not positive yields ``None`` in place of
    the numbers.
    """
    base = RngStream(seed, scenario.domain, r)
    procs = scenario.processes()
    p = procs[0].p
    mu = simgen.sample_mean_scenario(scenario.mean, p, base.child(scenario.domain | _MEAN))
    if scenario.kind == "two-sample":
        X1 = simgen.generate(procs[0].with_mean(mu), scenario.n, base.child(scenario.domain | _DATA1))
        X2 = simgen.generate(procs[1], scenario.n, base.child(scenario.domain | _DATA2))
        data = (X1, X2)
    else:
        data = simgen.generate(procs[0].with_mean(mu), scenario.n, base.child(scenario.domain | _DATA1))
    out = []
    for name in scenario.statistics:
        try:
            res = _run_statistic(name, scenario, data)
        except DegenerateVarianceError:
            out.append((name, None, None, None))
            continue
        out.append((name, res.statistic, res.p_value, res.reject))
    return out


def _run_chunk(args):
    scenario, seed, start, stop = args
    with threadpool_limits(limits=1):
        return start, [run_replicate(scenario, seed, r) for r in range(start, stop)]


@dataclass
class SummaryRow:
    scenario: str
    statistic: str
    kind: str
    model: str
    n: int
    p: int
    true_M: int
    m_order: int
    mean: str
    alpha: float
    replicates: int
    valid: int
    failed: int
    rejections: int

    @property
    def rate(self):
        return self.rejections / self.valid if self.valid else math.nan

    @property
    def se(self):
        r = self.rate
        return math.sqrt(r * (1.0 - r) / self.valid) if self.valid else math.nan

    @property
    def flagged(self):
        return self.failed > 0.001 * self.replicates


SUMMARY_COLUMNS = (
    "scenario", "statistic", "kind", "model", "n", "p", "true_M", "m_order", "mean",
    "alpha", "replicates", "valid", "failed", "rejections", "rate", "se", "flagged",
)


@dataclass
class ExperimentSummary:
    rows: list
    records: list = field(default_factory=list)
    p_values: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def row(self, scenario, statistic="T_new"):
        for r in self.rows:
            if r.scenario == scenario and r.statistic == statistic:
                return r
        raise KeyError((scenario, statistic))

    def write_csv(self, path):
        """Deterministic summary; wall time is deliberately omitted."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.scenario, r.statistic, r.kind, r.model, r.n, r.p, r.true_M,
                        r.m_order, r.mean, format_float(r.alpha), r.replicates, r.valid,
                        r.failed, r.rejections, format_float(r.rate), format_float(r.se),
                        int(r.flagged),
                    ]
                )


def _chunks(scenario, seed, workers):
    R = scenario.replicates
    size = max(1, min(250, math.ceil(R / (4 * workers))))
    return [(scenario, seed, a, min(R, a + size)) for a in range(0, R, size)]


def run_experiment(config, threads=1, keep_records=True):
    """Run every scenario of ``config``; output is independent of ``threads``."""
    config.validate()
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    t0 = time.perf_counter()
    rows, records, p_values = [], [], {}
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for sc in config.scenarios:
            jobs = _chunks(sc, config.seed, threads)
            if pool is None:
                results = [_run_chunk(job) for job in jobs]
            else:
                results = list(pool.map(_run_chunk, jobs))
            results.sort(key=lambda item: item[0])
            outcomes = [rep for _, chunk in results for rep in chunk]
            proc = sc.processes()[0]
            true_M = sc.M if sc.kind == "two-sample" else proc.M
            for k, name in enumerate(sc.statistics):
                row = SummaryRow(
                    scenario=sc.id, statistic=name, kind=sc.kind,
                    model=sc.model or ("two-sample" if sc.kind == "two-sample" else "custom"),
                    n=sc.n, p=proc.p, true_M=true_M, m_order=sc.m_order, mean=sc.mean,
                    alpha=sc.alpha, replicates=sc.replicates, valid=0, failed=0, rejections=0,
                )
                pv = []
                for r, rep in enumerate(outcomes):
                    _, value, p_value, reject = rep[k]
                    if value is None:
                        row.failed += 1
                        continue
                    row.valid += 1
                    row.rejections += int(reject)
                    pv.append(p_value)
                    if keep_records:
                        records.append(
                            ExperimentRecord(sc.id, sc.n, proc.p, sc.m_order, r, name,
                                             float(value), float(p_value), bool(reject))
                        )
                if row.flagged:
                    log.warning("%s/%s: %d of %d replicates had a non-positive variance",
                                sc.id, name, row.failed, sc.replicates)
                rows.append(row)
                p_values[(sc.id, name)] = np.array(pv)
    finally:
        if pool is not None:
            pool.shutdown()
    summary = ExperimentSummary(rows=rows, records=records, p_values=p_values,
                                wall_time=time.perf_counter() - t0)
    if config.results_path:
        save_results(records, config.results_path)
    if config.summary_path:
        summary.write_csv(config.summary_path)
    return summary


ROW_MEANS = {"size": "null", "power1": "power1", "power2": "power2"}
TWO_SAMPLE_MEANS = {"size": "null", "power1": "two-sample-1", "power2": "two-sample-2"}


def table_scenarios(table_id, replicates, rows=("size", "power1", "power2")):
    """Scenarios and their published targets for one reproduction table.

    Returns a list of ``(scenario, {statistic: target})``.
    """
    out = []
    if table_id == 1:
        for model in simgen.CATALOG:
            M = simgen.CATALOG[model].M
            for row in rows:
                for k, n in enumerate(targets.SAMPLE_SIZES_ONE):
                    sc = Scenario(
                        id=f"t1-{model}-{row}-n{n}", n=n, m_order=M, model=model,
                        mean=ROW_MEANS[row], replicates=replicates, statistics=STATISTICS,
                    )
                    ref = {s: targets.TABLE1[(model, row)][s][k] for s in STATISTICS}
                    out.append((sc, ref))
    elif table_id == 2:
        for row in rows:
            for M in (1, 2, 3):
                for k, n in enumerate(targets.SAMPLE_SIZES_TWO):
                    sc = Scenario(
                        id=f"t2-{row}-M{M}-n{n}", n=n, m_order=M, kind="two-sample", M=M,
                        mean=TWO_SAMPLE_MEANS[row], replicates=replicates,
                    )
                    out.append((sc, {"T_new": targets.TABLE2[(row, M)][k]}))
    elif table_id == 3:
        for row in rows:
            for n in targets.SAMPLE_SIZES_ONE:
                for m_order in range(5):
                    sc = Scenario(
                        id=f"t3-{row}-n{n}-m{m_order}", n=n, m_order=m_order, model="III",
                        mean=ROW_MEANS[row], replicates=replicates,
                    )
                    out.append((sc, {"T_new": targets.TABLE3[(row, n)][m_order]}))
    else:
        raise ConfigError(f"table id must be 1, 2 or 3, got {table_id!r}")
    return out


TABLE_COLUMNS = (
    "table", "scenario", "group", "row", "n", "m_order", "statistic", "replicates",
    "valid", "failed", "rate", "se", "paper", "abs_dev",
)


def reproduce_table(table_id, replicates, seed, out=None, threads=1, rows=("size", "power1", "power2")):
    """Simulate one published table and write observed vs. published rates.

    Returns the list of output rows as dictionaries.
    """
    cells = table_scenarios(table_id, replicates, rows)
    config = ExperimentConfig(scenarios=tuple(sc for sc, _ in cells), seed=seed)
    summary = run_experiment(config, threads=threads, keep_records=False)
    lines = []
    for sc, ref in cells:
        group = sc.model if sc.kind == "one-sample" else f"M={sc.M}"
        row_name = sc.id.split("-")[2] if table_id == 1 else sc.id.split("-")[1]
        for stat, paper in ref.items():
            r = summary.row(sc.id, stat)
            lines.append(
                {
                    "table": table_id, "scenario": sc.id, "group": group, "row": row_name,
                    "n": sc.n, "m_order": sc.m_order, "statistic": stat, "replicates": replicates,
                    "valid": r.valid, "failed": r.failed, "rate": r.rate, "se": r.se,
                    "paper": paper, "abs_dev": abs(r.rate - paper),
                }
            )
    if out is not None:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TABLE_COLUMNS)
            for line in lines:
                writer.writerow(
                    [format_float(v) if isinstance(v, float) else v for v in
                     (line[c] for c in TABLE_COLUMNS)]
                )
    return lines


def qq_points(p_values):
    """Uniform plotting positions ``(k - 0.5)/R`` against sorted p-values."""
    pv = np.sort(np.asarray(p_values, dtype=float))
    if pv.size == 0:
        raise ConfigError("no p-values to export")
    theo = (np.arange(1, pv.size + 1) - 0.5) / pv.size
    return theo, pv


def qq_export(p_values, out):
    theo, pv = qq_points(p_values)
    with open(out, "w", newline="") as fh:
        fh.write("theoretical,empirical\n")
        for a, b in zip(theo, pv):
            fh.write(f"{format_float(a)},{format_float(b)}\n")
    return theo, pv
