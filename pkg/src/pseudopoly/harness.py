"""Monte Carlo experiment runner: paired-decoder channel sweeps with
word/bit error accounting, Wilson intervals, rescue instrumentation, and a
versioned CSV schema.

Determinism contract: every trial draws its noise from a counter-based
generator keyed by (master seed, point index, trial index), and trials are
aggregated in fixed blocks merged strictly in index order. The emitted CSV
is therefore byte-identical for any worker count, and early stopping
decisions depend only on block-order aggregates.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from .channels import BiAwgn, Bsc, llr, transmit, trial_rng
from .codes import ParityCheckMatrix, from_alist, random_regular
from .decoders import (
    FRACTIONAL,
    INTEGRAL,
    Exhaustive,
    Randomized,
    facet_guess,
    lp_decode,
    sum_product_decode,
)
from .polytope import EPS_INT, build_polytope
from .simplex import SolverError

CSV_VERSION = "pseudopoly-csv v1"
CSV_COLUMNS = (
    "code_id,n,m,dv,dc,channel,param_db,decoder,trials,word_errors,bit_errors,"
    "wer,ber,wer_lo,wer_hi,lp_fractional,rescued,failures,seed"
)

LP_FAMILY = ("lp", "efg", "rfg")


@dataclass(frozen=True)
class CodeSpec:
    """Where the parity-check matrix comes from; picklable for workers."""

    kind: str  # "alist" | "random"
    alist_text: Optional[str] = None
    n: int = 0
    d_v: int = 0
    d_c: int = 0
    seed: int = 0
    label: Optional[str] = None

    @classmethod
    def from_alist_text(cls, text: str, label: str = "alist") -> "CodeSpec":
        return cls(kind="alist", alist_text=text, label=label)

    @classmethod
    def random(cls, n: int, d_v: int, d_c: int, seed: int) -> "CodeSpec":
        return cls(kind="random", n=n, d_v=d_v, d_c=d_c, seed=seed)

    def build(self) -> ParityCheckMatrix:
        if self.kind == "alist":
            return from_alist(self.alist_text)
        return random_regular(self.n, self.d_v, self.d_c, self.seed)

    @property
    def code_id(self) -> str:
        if self.kind == "random":
            return f"random-{self.d_v}-{self.d_c}-n{self.n}-s{self.seed}"
        return self.label or "alist"


@dataclass(frozen=True)
class DecoderSpec:
    name: str  # "lp" | "efg" | "rfg" | "sp"
    param: int = 0  # guesses for rfg, iterations for sp

    def __post_init__(self):
        if self.name not in ("lp", "efg", "rfg", "sp"):
            raise ValueError(f"unknown decoder {self.name!r}")
        if self.name in ("rfg", "sp") and self.param < 1:
            raise ValueError(f"decoder {self.name} needs a positive parameter")

    @property
    def label(self) -> str:
        if self.name in ("rfg", "sp"):
            return f"{self.name}:{self.param}"
        return self.name


def parse_decoder(token: str) -> DecoderSpec:
    """Parse tokens like ``lp``, ``efg``, ``rfg:20``, ``sp:100``."""
    name, _, param = token.partition(":")
    name = name.strip()
    if name == "sum_product":
        name = "sp"
    if param:
        return DecoderSpec(name, int(param))
    if name == "rfg":
        return DecoderSpec(name, 20)
    if name == "sp":
        return DecoderSpec(name, 100)
    return DecoderSpec(name)


@dataclass(frozen=True)
class ExperimentConfig:
    code: CodeSpec
    channel_kind: str  # "awgn" (param = Eb/N0 in dB) | "bsc" (param = p)
    points: tuple[float, ...]
    decoders: tuple[DecoderSpec, ...]
    trials: int
    master_seed: int
    max_word_errors: Optional[int] = None
    workers: int = 1
    block_size: int = 200
    keep_trial_log: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.decoders:
            raise ValueError("decoder list must be nonempty")
        if not self.points:
            raise ValueError("channel sweep must be nonempty")
        if self.channel_kind not in ("awgn", "bsc"):
            raise ValueError(f"unknown channel {self.channel_kind!r}")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be >= 1")


def make_channel(kind: str, param: float, rate: float):
    if kind == "awgn":
        return BiAwgn.from_ebn0_db(param, rate)
    return Bsc(param)


@dataclass
class PointDecoderStats:
    point_index: int
    param: float
    decoder: str
    trials: int = 0
    word_errors: int = 0
    bit_errors: int = 0
    lp_fractional: int = 0
    rescued: int = 0
    failures: int = 0
    wrong_rescues: int = 0

    def merge(self, other: "PointDecoderStats") -> None:
        self.trials += other.trials
        self.word_errors += other.word_errors
        self.bit_errors += other.bit_errors
        self.lp_fractional += other.lp_fractional
        self.rescued += other.rescued
        self.failures += other.failures
        self.wrong_rescues += other.wrong_rescues

    @property
    def wer(self) -> float:
        return self.word_errors / self.trials if self.trials else 0.0


@dataclass(frozen=True)
class TrialRecord:
    point_index: int
    trial_index: int
    decoder: str
    word_error: bool
    lp_was_fractional: bool
    rescued: bool


@dataclass
class SweepResult:
    config: ExperimentConfig
    n: int
    m: int
    d_v: int
    d_c: int
    rows: list[PointDecoderStats]
    trial_log: list[TrialRecord] = field(default_factory=list)

    def to_csv(self, stream: IO[str]) -> None:
        stream.write(f"# {CSV_VERSION}\n")
        stream.write(CSV_COLUMNS + "\n")
        cfg = self.config
        for row in self.rows:
            lo, hi = wilson_interval(row.word_errors, row.trials)
            ber = row.bit_errors / (row.trials * self.n) if row.trials else 0.0
            fields = [
                cfg.code.code_id,
                str(self.n),
                str(self.m),
                str(self.d_v),
                str(self.d_c),
                cfg.channel_kind,
                _fmt(row.param),
                row.decoder,
                str(row.trials),
                str(row.word_errors),
                str(row.bit_errors),
                _fmt(row.wer),
                _fmt(ber),
                _fmt(lo),
                _fmt(hi),
                str(row.lp_fractional),
                str(row.rescued),
                str(row.failures),
                str(cfg.master_seed),
            ]
            stream.write(",".join(fields) + "\n")


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def wilson_interval(errors: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= errors <= trials:
        raise ValueError("errors must lie in [0, trials]")
    p = errors / trials
    z2 = z * z
    den = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / den
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / den
    return (max(0.0, center - half), min(1.0, center + half))


# ---------------------------------------------------------------------------
# block execution (worker side)

_WORKER_CACHE: dict = {}


def _context_for(config: ExperimentConfig):
    key = (config.code, config.channel_kind, config.points)
    ctx = _WORKER_CACHE.get(key)
    if ctx is None:
        H = config.code.build()
        needs_lp = any(d.name in LP_FAMILY for d in config.decoders)
        P = build_polytope(H) if needs_lp else None
        rate = H.rate
        channels = tuple(make_channel(config.channel_kind, p, rate) for p in config.points)
        ctx = (H, P, channels)
        _WORKER_CACHE.clear()  # one cached context is enough per process
        _WORKER_CACHE[key] = ctx
    return ctx


def _bit_errors_against_zero(point, n: int) -> int:
    # transmitted word is all-zeros; fractional coordinates count as errors
    errs = 0
    for v in point:
        if abs(float(v)) > EPS_INT:
            errs += 1
    return errs


def _run_block(config: ExperimentConfig, point_index: int, start: int, count: int):
    H, P, channels = _context_for(config)
    channel = channels[point_index]
    n = H.n
    zeros = np.zeros(n, dtype=np.uint8)
    stats = {
        d.label: PointDecoderStats(point_index, config.points[point_index], d.label)
        for d in config.decoders
    }
    log: list[TrialRecord] = []
    needs_lp = any(d.name in LP_FAMILY for d in config.decoders)
    for trial in range(start, start + count):
        rng = trial_rng(config.master_seed, point_index, trial, stream=0)
        received = transmit(zeros, channel, rng)
        g = llr(received, channel)
        lp_out = None
        lp_failure: Optional[SolverError] = None
        if needs_lp:
            try:
                lp_out = lp_decode(P, g)
            except SolverError as exc:
                lp_failure = exc
        lp_fractional = lp_out is not None and lp_out.status == FRACTIONAL
        for spec in config.decoders:
            st = stats[spec.label]
            st.trials += 1
            if spec.name in LP_FAMILY:
                st.lp_fractional += int(lp_fractional)
            rescued = False
            try:
                if spec.name in LP_FAMILY and lp_failure is not None:
                    raise lp_failure
                if spec.name == "lp":
                    outcome = lp_out
                elif spec.name == "efg":
                    outcome = facet_guess(P, g, lp_outcome=lp_out, strategy=Exhaustive())
                elif spec.name == "rfg":
                    sub_seed = int(
                        trial_rng(config.master_seed, point_index, trial, stream=1).integers(2**63)
                    )
                    outcome = facet_guess(
                        P, g, lp_outcome=lp_out, strategy=Randomized(spec.param, sub_seed)
                    )
                else:
                    outcome = sum_product_decode(H, g, max_iters=spec.param)
            except SolverError:
                st.failures += 1
                st.word_errors += 1
                st.bit_errors += n
                if config.keep_trial_log:
                    log.append(TrialRecord(point_index, trial, spec.label, True, lp_fractional, False))
                continue
            if outcome.status == INTEGRAL:
                word = outcome.codeword
                error = bool(word.any())
                st.bit_errors += int(word.sum())
                if lp_fractional and spec.name in ("efg", "rfg"):
                    if not error:
                        rescued = True
                        st.rescued += 1
                    else:
                        st.wrong_rescues += 1
            else:
                error = True
                st.bit_errors += _bit_errors_against_zero(outcome.point, n)
            if error:
                st.word_errors += 1
            if config.keep_trial_log:
                log.append(
                    TrialRecord(point_index, trial, spec.label, error, lp_fractional, rescued)
                )
    return stats, log


def _stop_reached(totals: dict, config: ExperimentConfig) -> bool:
    if config.max_word_errors is None:
        return False
    return all(st.word_errors >= config.max_word_errors for st in totals.values())


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Run the configured sweep. Blocks of trials execute (possibly in
    parallel) and merge strictly in index order; a point stops early once
    every decoder has accumulated ``max_word_errors`` word errors."""
    H = config.code.build()
    deg = H.regular_degrees()
    d_v, d_c = deg if deg else (0, 0)
    result = SweepResult(config, H.n, H.m, d_v, d_c, rows=[])
    blocks_per_point = math.ceil(config.trials / config.block_size)

    executor = (
        ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    )
    try:
        for point_index in range(len(config.points)):
            totals = {
                d.label: PointDecoderStats(point_index, config.points[point_index], d.label)
                for d in config.decoders
            }
            futures: dict[int, object] = {}
            submitted = 0
            merged = 0
            while merged < blocks_per_point:
                if executor is not None:
                    while (
                        submitted < blocks_per_point
                        and submitted - merged < 2 * config.workers
                    ):
                        start = submitted * config.block_size
                        count = min(config.block_size, config.trials - start)
                        futures[submitted] = executor.submit(
                            _run_block, config, point_index, start, count
                        )
                        submitted += 1
                    stats, log = futures.pop(merged).result()
                else:
                    start = merged * config.block_size
                    count = min(config.block_size, config.trials - start)
                    stats, log = _run_block(config, point_index, start, count)
                for label, st in stats.items():
                    totals[label].merge(st)
                result.trial_log.extend(log)
                merged += 1
                if _stop_reached(totals, config):
                    break
            for fut in futures.values():
                fut.cancel()
            for d in config.decoders:
                result.rows.append(totals[d.label])
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)
    return result
