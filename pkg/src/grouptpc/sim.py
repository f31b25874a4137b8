"""Monte Carlo block-error-rate simulation of product codes over Gauss-Markov / ISI channels.

Trial ``t`` of sweep point ``p`` draws everything from its own stream
``default_rng([seed, p, t])``, and a point stops at the exact trial where the
error count reaches ``min_errors``; results therefore do not depend on how
trials are split across worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .belief import group_logprobs, group_to_bit_llrs, truncate_top
from .channel import ChannelParams, Constellation, equalize, gauss_markov_noise, isi_channel, modulate, snr_to_sigma
from .codes import ComponentCode, make_code
from .config import ExperimentConfig
from .product import encode_cells, product_rate
from .turbo import SisoParams, turbo_decode_bit, turbo_decode_group

CHUNK = 64


@dataclass
class TrialResult:
    error: bool
    half_iters: int
    queries: int
    decodes: int


class Simulator:
    """Encode -> modulate -> channel -> preprocessing -> turbo decode, for one configuration."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.code: ComponentCode = make_code(cfg.family, cfg.N, cfg.K, cfg.b, cfg.code_seed)
        self.const = Constellation(cfg.ell, cfg.modulation)
        self.g = cfg.b // cfg.ell
        self.rate = product_rate(self.code)
        self.siso = SisoParams(cfg.n_list, cfg.threshold, cfg.max_queries, cfg.pattern)

    @cached_property
    def n_b(self) -> int:
        return min(self.cfg.effective_n_b, 1 << self.cfg.b)

    def sigma2(self, eb_n0_db: float) -> float:
        return snr_to_sigma(eb_n0_db, self.rate, self.cfg.ell)

    def receive(self, cells: np.ndarray, sigma2: float, rng) -> np.ndarray:
        """Equalized channel output for the row-major serialized word."""
        cfg = self.cfg
        x = modulate(cells.reshape(-1), self.const)
        if cfg.channel == "isi":
            p = ChannelParams(cfg.rho, sigma2)
            return equalize(isi_channel(x, p, rng), cfg.rho)
        return x + gauss_markov_noise(x.size, cfg.rho, sigma2, rng, self.const.is_complex)

    def channel_logprobs(self, y: np.ndarray, sigma2: float) -> np.ndarray:
        cfg = self.cfg
        lp = group_logprobs(y, self.const, cfg.rho, sigma2, self.g, cfg.scheme)
        return lp.reshape(cfg.N, cfg.N, -1)

    def decode(self, lp: np.ndarray, trace=None):
        cfg = self.cfg
        if cfg.mode == "group":
            return turbo_decode_group(truncate_top(lp, self.n_b), self.code, cfg.alpha,
                                      cfg.i_max, self.siso, trace)
        return turbo_decode_bit(group_to_bit_llrs(lp), self.code, cfg.alpha, cfg.i_max,
                                self.siso, trace)

    def transmit(self, rng):
        K, b = self.cfg.K, self.cfg.b
        u = rng.integers(0, 2, size=(K, K, b), dtype=np.uint8)
        return encode_cells(u, self.code)

    def trial(self, point: int, t: int, sigma2: float) -> TrialResult:
        rng = np.random.default_rng([self.cfg.seed, point, t])
        cells = self.transmit(rng)
        y = self.receive(cells, sigma2, rng)
        out, stats = self.decode(self.channel_logprobs(y, sigma2))
        return TrialResult(bool(np.any(out != cells)), stats.half_iters, stats.queries, stats.decodes)


def _run_chunk(args):
    cfg, point, start, stop, sigma2 = args
    sim = _worker_sim(cfg)
    res = [sim.trial(point, t, sigma2) for t in range(start, stop)]
    return (np.array([r.error for r in res], dtype=bool),
            np.array([r.half_iters for r in res], dtype=np.int64),
            np.array([r.queries for r in res], dtype=np.int64),
            np.array([r.decodes for r in res], dtype=np.int64))


_SIM_CACHE: dict = {}


def _worker_sim(cfg: ExperimentConfig) -> Simulator:
    key = cfg.one_line()
    sim = _SIM_CACHE.get(key)
    if sim is None:
        _SIM_CACHE.clear()
        sim = _SIM_CACHE[key] = Simulator(cfg)
    return sim


@dataclass
class PointResult:
    eb_n0_db: float
    trials: int
    block_errors: int
    half_iters: int
    queries: int
    decodes: int

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials

    @property
    def std_err(self) -> float:
        p = self.bler
        return float(np.sqrt(p * (1 - p) / self.trials))

    @property
    def avg_half_iters(self) -> float:
        return self.half_iters / self.trials

    @property
    def avg_queries(self) -> float:
        return self.queries / max(self.decodes, 1)


def simulate_point(cfg: ExperimentConfig, point: int, eb_n0_db: float,
                   workers: int = 1, pool=None) -> PointResult:
    sim = _worker_sim(cfg)
    sigma2 = sim.sigma2(eb_n0_db)
    errors = trials = half = queries = decodes = 0
    start = 0
    while trials < cfg.max_trials and errors < cfg.min_errors:
        batch = []
        for _ in range(max(workers, 1)):
            if start >= cfg.max_trials:
                break
            stop = min(start + CHUNK, cfg.max_trials)
            batch.append((cfg, point, start, stop, sigma2))
            start = stop
        results = pool.map(_run_chunk, batch) if pool is not None else map(_run_chunk, batch)
        for err, hi, q, d in results:
            if errors >= cfg.min_errors:
                break
            cum = np.cumsum(err)
            hit = np.nonzero(errors + cum >= cfg.min_errors)[0]
            n = hit[0] + 1 if hit.size else err.size
            errors += int(err[:n].sum())
            trials += int(n)
            half += int(hi[:n].sum())
            queries += int(q[:n].sum())
            decodes += int(d[:n].sum())
    return PointResult(eb_n0_db, trials, errors, half, queries, decodes)


BLER_COLUMNS = ["scheme", "mode", "eb_n0_db", "trials", "block_errors", "bler",
                "avg_half_iters", "avg_queries", "std_err"]


def run_bler(cfg: ExperimentConfig, workers: int = 1, progress=None) -> list[dict]:
    """One CSV row per Eb/N0 point.

    With ``stop_bler > 0`` the sweep ends after the first point whose BLER
    falls below it, so the grid only needs to start low enough.
    """
    rows = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for p, ebn0 in enumerate(cfg.ebn0):
            r = simulate_point(cfg, p, ebn0, workers, pool)
            row = dict(scheme=cfg.scheme, mode=cfg.mode, eb_n0_db=ebn0, trials=r.trials,
                       block_errors=r.block_errors, bler=r.bler,
                       avg_half_iters=r.avg_half_iters, avg_queries=r.avg_queries,
                       std_err=r.std_err)
            rows.append(row)
            if progress:
                progress(row)
            if cfg.stop_bler > 0 and r.bler < cfg.stop_bler:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def ebn0_at_bler(rows, target: float) -> float:
    """Eb/N0 where the BLER curve crosses ``target`` (log-linear interpolation).

    Returns ``nan`` when the sweep does not bracket the target.
    """
    pts = sorted((r["eb_n0_db"], r["bler"]) for r in rows)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 >= target > y1:
            if y1 <= 0:
                return x1
            f = (np.log10(y0) - np.log10(target)) / (np.log10(y0) - np.log10(y1))
            return float(x0 + f * (x1 - x0))
    return float("nan")
