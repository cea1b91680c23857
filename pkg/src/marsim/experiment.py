"""PDR statistics, seed-paired campaigns and the results CSV."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st

from .config import ScenarioConfig, channel_name, protocol_name
from .sim import RunStats, run_scenario

NA = "NA"
RUN_HEADER = ("protocol", "channel", "seed", "sent", "delivered", "pdr")


def pdr(stats: RunStats) -> float:
    if stats.sent == 0:
        raise ValueError("no traffic originated")
    return stats.delivered / stats.sent


def confidence_interval(samples, level: float = 0.95) -> tuple:
    """(mean, half width) of the Student-t interval."""
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < 2:
        raise ValueError("need at least two samples for a confidence interval")
    mean = float(x.mean())
    s = float(x.std(ddof=1))
    q = float(_st.t.ppf((1.0 + level) / 2.0, n - 1))
    return mean, q * s / math.sqrt(n)


@dataclass(frozen=True)
class RunRow:
    protocol: str
    channel: str
    seed: int
    sent: int
    delivered: int
    pdr: float


@dataclass(frozen=True)
class AggregateRow:
    protocol: str
    channel: str
    n: int
    mean_pdr: float
    ci_halfwidth: float | None


@dataclass
class CampaignResult:
    runs: list
    aggregates: list

    def aggregate(self, protocol: str, channel: str) -> AggregateRow:
        protocol, channel = protocol_name(protocol), channel_name(channel)
        for row in self.aggregates:
            if row.protocol == protocol and row.channel == channel:
                return row
        raise KeyError((protocol, channel))

    def pdrs(self, protocol: str, channel: str) -> list:
        protocol, channel = protocol_name(protocol), channel_name(channel)
        return [r.pdr for r in self.runs if r.protocol == protocol and r.channel == channel]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RUN_HEADER)
        for r in self.runs:
            w.writerow([r.protocol, r.channel, r.seed, r.sent, r.delivered, repr(r.pdr)])
        for a in self.aggregates:
            ci = NA if a.ci_halfwidth is None else repr(a.ci_halfwidth)
            w.writerow([a.protocol, a.channel, "AGG", a.n, repr(a.mean_pdr), ci])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def read_csv(text: str) -> CampaignResult:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != RUN_HEADER:
        raise ValueError("results CSV header mismatch")
    runs, aggs = [], []
    for row in rows[1:]:
        if row[2] == "AGG":
            ci = None if row[5] == NA else float(row[5])
            aggs.append(AggregateRow(row[0], row[1], int(row[3]), float(row[4]), ci))
        else:
            runs.append(RunRow(row[0], row[1], int(row[2]), int(row[3]), int(row[4]),
                               float(row[5])))
    return CampaignResult(runs, aggs)


def _one_run(args) -> RunRow:
    cfg, seed = args
    st = run_scenario(cfg, seed)
    return RunRow(cfg.protocol, cfg.channel, seed, st.sent, st.delivered, pdr(st))


def run_campaign(config: ScenarioConfig, protocols, channels, runs: int,
                 base_seed: int | None = None, workers: int = 1, progress=None) -> CampaignResult:
    """Every protocol x channel over the same seeds base_seed .. base_seed+runs-1."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    base = config.seed if base_seed is None else base_seed
    protocols = [protocol_name(p) for p in protocols]
    channels = [channel_name(c) for c in channels]
    jobs = []
    for p in protocols:
        for c in channels:
            cfg = config.replace(protocol=p, channel=c).validate()
            jobs.extend((cfg, base + k) for k in range(runs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_one_run, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(_one_run(job))
            if progress is not None:
                progress(rows[-1])
    aggregates = []
    for p in protocols:
        for c in channels:
            values = [r.pdr for r in rows if r.protocol == p and r.channel == c]
            if len(values) >= 2:
                mean, half = confidence_interval(values)
            else:
                mean, half = float(np.mean(values)), None
            aggregates.append(AggregateRow(p, c, len(values), mean, half))
    return CampaignResult(rows, aggregates)
