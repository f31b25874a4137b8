"""Iterative decoding of square product codes with group or bit probabilities.

Each full iteration decodes all columns, then all rows. A half-iteration runs
the soft-output list decoder on every line, forms the extrinsic term
(APP minus channel minus a-priori) and keeps ``alpha`` times it as the next
a-priori. Decoding stops once the hard decision is a valid product codeword or
after ``i_max`` full iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.special import logsumexp

from .belief import LLR_CLAMP
from .codes import ComponentCode
from .sogrand import DEFAULT_MAX_QUERIES, PATTERN_MODES, WORKSPACE_ROWS, list_ratio, marginalize_core, new_workspace, sogrand_core_ws

COLUMNS = 0
ROWS = 1


def normalize_log(v) -> np.ndarray:
    """v_i - log(sum_j exp(v_j)) along the last axis, computed with a max shift."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] == 0 or np.any(np.all(v == -np.inf, axis=-1)):
        raise ValueError("cannot normalize: all entries are -inf")
    return v - logsumexp(v, axis=-1, keepdims=True)


def jacobian_log(a: float, c: float) -> float:
    """log(e^a + e^c) = max(a, c) + log1p(e^-|a - c|)."""
    if a == -np.inf:
        return c
    if c == -np.inf:
        return a
    return max(a, c) + np.log1p(np.exp(-abs(a - c)))


@dataclass
class TurboStats:
    half_iters: int
    queries: int
    decodes: int
    valid: bool


@dataclass
class SisoParams:
    n_list: int = 4
    threshold: float = 1e-4
    max_queries: int = DEFAULT_MAX_QUERIES
    pattern: str = "exact"

    def __post_init__(self):
        if self.n_list < 1:
            raise ValueError("n_list must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.max_queries <= 0:
            raise ValueError("max_queries must be positive")
        if self.pattern not in PATTERN_MODES:
            raise ValueError(f"unknown pattern mode {self.pattern!r}")


@njit(cache=True)
def _cell(axis, line, pos):
    if axis == 0:
        return pos, line
    return line, pos


@njit(cache=True)
def _half_iter_group(logCh, logA, syn, axis, n_list, thresh, max_q, mode, ratio, alpha, floor):
    N = logCh.shape[0]
    Q = logCh.shape[2]
    logAPP = np.full(logCh.shape, -np.inf)
    newA = np.full(logCh.shape, -np.inf)
    lin = np.empty((N, Q))
    ndi, ndf, hp = new_workspace(WORKSPACE_ROWS)
    queries = 0
    for line in range(N):
        for pos in range(N):
            i, j = _cell(axis, line, pos)
            mx = -np.inf
            for m in range(Q):
                v = logCh[i, j, m] + logA[i, j, m]
                lin[pos, m] = v
                if v > mx:
                    mx = v
            s = 0.0
            for m in range(Q):
                s += np.exp(lin[pos, m] - mx)
            lse = mx + np.log(s)
            for m in range(Q):
                lin[pos, m] -= lse
        words, lps, nf, pa, q = sogrand_core_ws(lin, syn, n_list, thresh, max_q, mode, ratio, ndi, ndf, hp)
        queries += q
        app, pnil = marginalize_core(words, lps, pa, lin)
        for pos in range(N):
            i, j = _cell(axis, line, pos)
            for m in range(Q):
                if logCh[i, j, m] > -np.inf:
                    la = np.log(app[pos, m]) if app[pos, m] > 0.0 else floor
                    if la < floor:
                        la = floor
                    logAPP[i, j, m] = la
                    newA[i, j, m] = alpha * (la - logCh[i, j, m] - logA[i, j, m])
    return logAPP, newA, queries


@njit(cache=True)
def _half_iter_bit(LCh, LA, syn, axis, n_list, thresh, max_q, mode, ratio, alpha, clamp):
    N = LCh.shape[0]
    b = LCh.shape[2]
    LAPP = np.empty(LCh.shape)
    newA = np.empty(LCh.shape)
    lin = np.empty((N * b, 2))
    ndi, ndf, hp = new_workspace(WORKSPACE_ROWS)
    queries = 0
    for line in range(N):
        for pos in range(N):
            i, j = _cell(axis, line, pos)
            for s in range(b):
                L = LCh[i, j, s] + LA[i, j, s]
                if L > clamp:
                    L = clamp
                elif L < -clamp:
                    L = -clamp
                # log sigmoid, stable in both tails
                if L >= 0:
                    lin[pos * b + s, 0] = -np.log1p(np.exp(-L))
                    lin[pos * b + s, 1] = -L - np.log1p(np.exp(-L))
                else:
                    lin[pos * b + s, 0] = L - np.log1p(np.exp(L))
                    lin[pos * b + s, 1] = -np.log1p(np.exp(L))
        words, lps, nf, pa, q = sogrand_core_ws(lin, syn, n_list, thresh, max_q, mode, ratio, ndi, ndf, hp)
        queries += q
        app, pnil = marginalize_core(words, lps, pa, lin)
        for pos in range(N):
            i, j = _cell(axis, line, pos)
            for s in range(b):
                p0 = app[pos * b + s, 0]
                p1 = app[pos * b + s, 1]
                if p0 <= 0.0:
                    L = -clamp
                elif p1 <= 0.0:
                    L = clamp
                else:
                    L = np.log(p0) - np.log(p1)
                    if L > clamp:
                        L = clamp
                    elif L < -clamp:
                        L = -clamp
                LAPP[i, j, s] = L
                e = alpha * (L - LCh[i, j, s] - LA[i, j, s])
                if e > clamp:
                    e = clamp
                elif e < -clamp:
                    e = -clamp
                newA[i, j, s] = e
    return LAPP, newA, queries


@njit(cache=True)
def grid_is_valid(values, syn):
    """Validity of an (N, N) grid of cell values against cell-level syndrome contributions."""
    N = values.shape[0]
    for line in range(N):
        sr = np.int64(0)
        sc = np.int64(0)
        for pos in range(N):
            sr ^= syn[pos, values[line, pos]]
            sc ^= syn[pos, values[pos, line]]
        if sr != 0 or sc != 0:
            return False
    return True


@njit(cache=True)
def _argmax_cells(logAPP):
    N = logAPP.shape[0]
    Q = logAPP.shape[2]
    out = np.empty((N, N), dtype=np.int64)
    for i in range(N):
        for j in range(N):
            best = -np.inf
            idx = 0
            for m in range(Q):
                if logAPP[i, j, m] > best:
                    best = logAPP[i, j, m]
                    idx = m
            out[i, j] = idx
    return out


def cells_to_bits(values, b: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    return ((values[..., None] >> np.arange(b)) & 1).astype(np.uint8)


def bits_to_cells(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    return (bits << np.arange(bits.shape[-1])).sum(axis=-1)


def _check_common(code: ComponentCode, alpha: float, i_max: int):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if i_max < 1:
        raise ValueError(f"i_max must be >= 1, got {i_max}")


def turbo_decode_group(logCh, code: ComponentCode, alpha: float = 0.5, i_max: int = 8,
                       siso: SisoParams | None = None, trace: list | None = None):
    """Group-probability turbo decoding.

    ``logCh`` has shape (N, N, 2^b) with normalized channel log-probabilities
    per cell and ``-inf`` outside each cell's retained support. Returns the
    hard-decision bits (N, N, b) and :class:`TurboStats`. If ``trace`` is a
    list, a dict per half-iteration is appended to it.
    """
    siso = siso or SisoParams()
    _check_common(code, alpha, i_max)
    logCh = np.ascontiguousarray(logCh, dtype=float)
    N, b = code.N, code.b
    if logCh.shape != (N, N, 1 << b):
        raise ValueError(f"expected channel beliefs of shape {(N, N, 1 << b)}, got {logCh.shape}")
    syn = code.syndrome_table(b)
    ratio = list_ratio(code.k, code.n)
    support = np.isfinite(logCh)
    n_sup = support.sum(axis=-1, keepdims=True)
    logA = np.where(support, -np.log(np.maximum(n_sup, 1)), -np.inf)
    floor = -LLR_CLAMP * b
    mode = PATTERN_MODES[siso.pattern]
    queries = decodes = 0
    hd = None
    valid = False
    half = 0
    for half in range(1, 2 * i_max + 1):
        axis = COLUMNS if half % 2 == 1 else ROWS
        logAPP, newA, q = _half_iter_group(
            logCh, logA, syn, axis, siso.n_list, siso.threshold, siso.max_queries,
            mode, ratio, alpha, floor,
        )
        queries += q
        decodes += N
        hd = _argmax_cells(logAPP)
        valid = grid_is_valid(hd, syn)
        if trace is not None:
            trace.append(dict(axis=axis, logAPP=logAPP, logA=logA, newA=newA, logCh=logCh,
                              alpha=alpha, hd=hd, valid=valid))
        logA = newA
        if valid:
            break
    return cells_to_bits(hd, b), TurboStats(half, queries, decodes, bool(valid))


def turbo_decode_bit(LCh, code: ComponentCode, alpha: float = 0.5, i_max: int = 8,
                     siso: SisoParams | None = None, trace: list | None = None):
    """Bit-probability (LLR) turbo decoding; ``LCh`` has shape (N, N, b)."""
    siso = siso or SisoParams()
    _check_common(code, alpha, i_max)
    LCh = np.clip(np.ascontiguousarray(LCh, dtype=float), -LLR_CLAMP, LLR_CLAMP)
    N, b = code.N, code.b
    if LCh.shape != (N, N, b):
        raise ValueError(f"expected channel LLRs of shape {(N, N, b)}, got {LCh.shape}")
    syn_bit = code.syndrome_table(1)
    syn_cell = code.syndrome_table(b)
    ratio = list_ratio(code.k, code.n)
    LA = np.zeros_like(LCh)
    mode = PATTERN_MODES[siso.pattern]
    queries = decodes = 0
    bits = None
    valid = False
    half = 0
    for half in range(1, 2 * i_max + 1):
        axis = COLUMNS if half % 2 == 1 else ROWS
        LAPP, newA, q = _half_iter_bit(
            LCh, LA, syn_bit, axis, siso.n_list, siso.threshold, siso.max_queries,
            mode, ratio, alpha, LLR_CLAMP,
        )
        queries += q
        decodes += N
        bits = (LAPP < 0).astype(np.uint8)
        valid = grid_is_valid(bits_to_cells(bits), syn_cell)
        if trace is not None:
            trace.append(dict(axis=axis, LAPP=LAPP, LA=LA, newA=newA, LCh=LCh,
                              alpha=alpha, hd=bits, valid=valid))
        LA = newA
        if valid:
            break
    return bits, TurboStats(half, queries, decodes, bool(valid))
