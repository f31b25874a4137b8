"""Soft-output list GRAND over positions with arbitrary finite supports.

A decoder input is an array ``logp`` of shape (P, Q): row ``i`` holds the
normalized log-probabilities of the values a position can take, with
``-inf`` marking values outside its support. Group decoding uses one position
per cell (Q = 2^b); bit decoding uses one position per bit (Q = 2).

Noise patterns substitute at most one alternative per position. They are
generated best-first over a tree in which each pattern has a unique parent:
positions are sorted by their cheapest alternative, and a pattern whose last
substitution sits at sorted position p with alternative rank r has the
children (p, r+1), append (p+1, 0), and, when r == 0, shift to (p+1, 0).
Children never cost less than their parent, so a heap ordered by
(cost, substitutions, creation index) pops patterns in nondecreasing cost.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
from numba import njit

EXACT = 0
ONELINE = 1
PATTERN_MODES = {"exact": EXACT, "oneline": ONELINE}
DEFAULT_MAX_QUERIES = 100_000
NODE_BITS = 40
NODE_MASK = (1 << NODE_BITS) - 1


@dataclass
class SoftOutput:
    """Listed codewords (value per position), their APPs, and the not-in-list mass."""

    words: np.ndarray
    app: np.ndarray
    p_not_in_list: float
    queries: int
    log_pseq: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.words)


def list_ratio(k: int, n: int) -> float:
    """(2^k - 1) / (2^n - 1) for binary dimensions k < n, without overflow."""
    return float((2.0**k - 1.0) / (2.0**n - 1.0)) if n < 1000 else 2.0 ** (k - n)


def hard_decision(logp) -> np.ndarray:
    """Per-position argmax; ties go to the lowest value."""
    logp = np.asarray(logp, dtype=float)
    if logp.ndim != 2 or logp.shape[1] == 0 or not np.all(np.isfinite(logp).any(axis=1)):
        raise ValueError("every position needs a nonempty support")
    return np.argmax(logp, axis=1)


def exceedance_llrs(logp) -> list[dict[int, float]]:
    """delta_i(mu) = log P_i(hd_i) - log P_i(mu) for every alternative mu in the support."""
    logp = np.asarray(logp, dtype=float)
    hd = hard_decision(logp)
    out = []
    for i, row in enumerate(logp):
        out.append({int(m): float(row[hd[i]] - row[m])
                    for m in np.nonzero(np.isfinite(row))[0] if m != hd[i]})
    return out


def _sorted_alternatives(logp, hd):
    P, Q = logp.shape
    alt_mu = np.full((P, max(Q - 1, 1)), -1, dtype=np.int64)
    alt_d = np.zeros((P, max(Q - 1, 1)))
    n_alt = np.zeros(P, dtype=np.int64)
    for i in range(P):
        cand = [m for m in range(Q) if m != hd[i] and np.isfinite(logp[i, m])]
        cand.sort(key=lambda m: (logp[i, hd[i]] - logp[i, m], m))
        n_alt[i] = len(cand)
        for r, m in enumerate(cand):
            alt_mu[i, r] = m
            alt_d[i, r] = logp[i, hd[i]] - logp[i, m]
    return alt_mu, alt_d, n_alt


def oneline_weights(alt_d, n_alt) -> np.ndarray:
    """Integer weights round(rank * slope) from a least-squares line through the origin.

    All alternatives are ranked 1..M by increasing delta (ties by position,
    then by rank within the position); the slope fits the sorted deltas
    against their ranks.
    """
    return _oneline_weights(np.asarray(alt_d, dtype=float), np.asarray(n_alt, dtype=np.int64))


@njit(cache=True)
def _oneline_weights(alt_d, n_alt):
    P = alt_d.shape[0]
    total = 0
    for i in range(P):
        total += n_alt[i]
    w = np.zeros_like(alt_d)
    if total == 0:
        return w
    vals = np.empty(total)
    pos = np.empty(total, dtype=np.int64)
    rk = np.empty(total, dtype=np.int64)
    t = 0
    for i in range(P):
        for r in range(n_alt[i]):
            vals[t] = alt_d[i, r]
            pos[t] = i
            rk[t] = r
            t += 1
    order = np.argsort(vals, kind="mergesort")
    num = 0.0
    den = 0.0
    for j in range(total):
        rank = j + 1.0
        num += rank * vals[order[j]]
        den += rank * rank
    slope = num / den
    for j in range(total):
        w[pos[order[j]], rk[order[j]]] = np.floor((j + 1.0) * slope + 0.5)
    return w


def _position_order(weights, alt_d, n_alt):
    active = [i for i in range(len(n_alt)) if n_alt[i] > 0]
    active.sort(key=lambda i: (weights[i, 0], alt_d[i, 0], i))
    return np.array(active, dtype=np.int64)


def pattern_stream(logp, mode: str = "exact", max_queries: int = DEFAULT_MAX_QUERIES):
    """Yield candidate sequences (arrays of values per position), most likely first.

    Pure-Python reference for the order used by :func:`sogrand_decode`; the
    first emission is the hard decision.
    """
    if max_queries <= 0:
        raise ValueError("max_queries must be positive")
    if mode not in PATTERN_MODES:
        raise ValueError(f"unknown pattern mode {mode!r}")
    logp = np.asarray(logp, dtype=float)
    hd = hard_decision(logp)
    alt_mu, alt_d, n_alt = _sorted_alternatives(logp, hd)
    weights = alt_d if mode == "exact" else oneline_weights(alt_d, n_alt)
    order = _position_order(weights, alt_d, n_alt)
    n_pos = len(order)

    # node: (prefix_node, sorted_pos, rank); node 0 is the empty pattern
    nodes = [(-1, -1, -1)]
    heap = [(0.0, 0, 0)]
    emitted = 0

    def push(cost, nsub, prefix, p, r):
        nodes.append((prefix, p, r))
        heapq.heappush(heap, (cost, nsub, len(nodes) - 1))

    while heap and emitted < max_queries:
        cost, nsub, v = heapq.heappop(heap)
        word = hd.copy()
        u = v
        while u > 0:
            prefix, p, r = nodes[u]
            word[order[p]] = alt_mu[order[p], r]
            u = prefix
        yield word
        emitted += 1
        prefix, p, r = nodes[v]
        if v == 0:
            if n_pos:
                push(cost + weights[order[0], 0], 1, 0, 0, 0)
            continue
        i = order[p]
        if r + 1 < n_alt[i]:
            push(cost + (weights[i, r + 1] - weights[i, r]), nsub, prefix, p, r + 1)
        if p + 1 < n_pos:
            j = order[p + 1]
            push(cost + weights[j, 0], nsub + 1, v, p + 1, 0)
            if r == 0:
                push(cost + (weights[j, 0] - weights[i, 0]), nsub, prefix, p + 1, 0)


@njit(cache=True)
def _key_less(wa, ta, wb, tb):
    return wa < wb or (wa == wb and ta < tb)


@njit(cache=True)
def _grow_f(arr, size):
    out = np.empty(size, dtype=arr.dtype)
    out[: arr.size] = arr
    return out


@njit(cache=True)
def _grow_rows(arr, rows):
    out = np.empty((rows, arr.shape[1]), dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


WORKSPACE_ROWS = 1 << 16


@njit(cache=True)
def new_workspace(rows=WORKSPACE_ROWS):
    """Node and heap buffers for :func:`sogrand_core_ws`, reusable across calls."""
    return np.empty((rows, 5), dtype=np.int64), np.empty((rows, 2)), np.empty((rows, 2))


@njit(cache=True)
def sogrand_core(logp, syn, n_list, thresh, max_queries, mode, ratio):
    """List decoding of one word.

    Returns ``(words, log_pseq, n_found, p_a, queries)`` where ``words`` has
    shape (n_list, P) and ``p_a`` is the final not-in-list weight P(A).
    """
    ndi, ndf, hp = new_workspace(4096)
    return sogrand_core_ws(logp, syn, n_list, thresh, max_queries, mode, ratio, ndi, ndf, hp)


@njit(cache=True)
def sogrand_core_ws(logp, syn, n_list, thresh, max_queries, mode, ratio, ndi, ndf, hp):
    """:func:`sogrand_core` with caller-provided node (``ndi``, ``ndf``) and heap (``hp``) buffers."""
    P, Q = logp.shape
    hd = np.empty(P, dtype=np.int64)
    lp_hd = 0.0
    s0 = np.int64(0)
    for i in range(P):
        best = -np.inf
        idx = -1
        for m in range(Q):
            if logp[i, m] > best:
                best = logp[i, m]
                idx = m
        hd[i] = idx
        lp_hd += best
        s0 ^= syn[i, idx]

    A = max(Q - 1, 1)
    alt_mu = np.full((P, A), -1, dtype=np.int64)
    alt_d = np.zeros((P, A))
    n_alt = np.zeros(P, dtype=np.int64)
    for i in range(P):
        c = 0
        for m in range(Q):
            if m != hd[i] and logp[i, m] > -np.inf:
                d = logp[i, hd[i]] - logp[i, m]
                # insertion sort by (delta, value)
                j = c
                while j > 0 and (alt_d[i, j - 1] > d):
                    alt_d[i, j] = alt_d[i, j - 1]
                    alt_mu[i, j] = alt_mu[i, j - 1]
                    j -= 1
                alt_d[i, j] = d
                alt_mu[i, j] = m
                c += 1
        n_alt[i] = c

    if mode == 1:
        wts = _oneline_weights(alt_d, n_alt)
    else:
        wts = alt_d

    n_pos = 0
    for i in range(P):
        if n_alt[i] > 0:
            n_pos += 1
    order = np.empty(n_pos, dtype=np.int64)
    t = 0
    for i in range(P):
        if n_alt[i] > 0:
            # insertion by (weight, delta, index)
            j = t
            while j > 0:
                o = order[j - 1]
                if wts[o, 0] > wts[i, 0] or (wts[o, 0] == wts[i, 0] and alt_d[o, 0] > alt_d[i, 0]):
                    order[j] = o
                    j -= 1
                else:
                    break
            order[j] = i
            t += 1

    # syndrome change of substituting alternative r at position i
    dsyn = np.zeros((P, A), dtype=np.int64)
    for i in range(P):
        for r in range(n_alt[i]):
            dsyn[i, r] = syn[i, hd[i]] ^ syn[i, alt_mu[i, r]]

    # node fields: prefix, sorted position, rank, substitutions, syndrome | weight, delta
    cap = ndi.shape[0]
    # heap entries carry their keys inline: weight, then (substitutions << 40 | node id)
    # (tie key < 2^53, so it is exact as a float)
    n_nodes = 1
    ndi[0, 0] = -1
    ndi[0, 1] = -1
    ndi[0, 2] = -1
    ndf[0, 0] = 0.0
    ndf[0, 1] = 0.0
    ndi[0, 3] = 0
    ndi[0, 4] = s0
    hp[0, 0] = 0.0
    hp[0, 1] = 0.0
    hsize = 1

    words = np.zeros((n_list, P), dtype=np.int64)
    log_pseq = np.zeros(n_list)
    n_found = 0
    cum = 0.0
    sum_list = 0.0
    p_a = ratio
    queries = 0

    while hsize > 0 and queries < max_queries:
        # pop
        v = np.int64(hp[0, 1]) & NODE_MASK
        hsize -= 1
        if hsize > 0:
            w_last = hp[hsize, 0]
            t_last = hp[hsize, 1]
            # bottom-up sift: walk the hole down along the smallest children, then
            # move the former last entry back up (it usually belongs near the leaves)
            k = 0
            while True:
                l = 4 * k + 1
                if l >= hsize:
                    break
                c = l
                e = l + 4 if l + 4 < hsize else hsize
                for m in range(l + 1, e):
                    if _key_less(hp[m, 0], hp[m, 1], hp[c, 0], hp[c, 1]):
                        c = m
                hp[k, 0] = hp[c, 0]
                hp[k, 1] = hp[c, 1]
                k = c
            while k > 0:
                par = (k - 1) // 4
                if _key_less(w_last, t_last, hp[par, 0], hp[par, 1]):
                    hp[k, 0] = hp[par, 0]
                    hp[k, 1] = hp[par, 1]
                    k = par
                else:
                    break
            hp[k, 0] = w_last
            hp[k, 1] = t_last
        queries += 1
        lp = lp_hd - ndf[v, 1]
        pr = np.exp(lp)
        cum += pr
        rem = 1.0 - cum
        if rem < 0.0:
            rem = 0.0
        p_a = rem * ratio
        if ndi[v, 4] == 0:
            for i in range(P):
                words[n_found, i] = hd[i]
            u = v
            while u > 0:
                pi = order[ndi[u, 1]]
                words[n_found, pi] = alt_mu[pi, ndi[u, 2]]
                u = ndi[u, 0]
            log_pseq[n_found] = lp
            sum_list += pr
            n_found += 1
            if n_found >= n_list:
                break
        if n_found > 0 and p_a / (sum_list + p_a) < thresh:
            break

        # expand children
        if n_nodes + 3 > cap:
            cap *= 2
            ndi = _grow_rows(ndi, cap)
            ndf = _grow_rows(ndf, cap)
            hp = _grow_rows(hp, cap)
        n_new = 0
        first_new = n_nodes
        if v == 0:
            if n_pos > 0:
                i0 = order[0]
                ndi[n_nodes, 0] = 0
                ndi[n_nodes, 1] = 0
                ndi[n_nodes, 2] = 0
                ndf[n_nodes, 0] = wts[i0, 0]
                ndf[n_nodes, 1] = alt_d[i0, 0]
                ndi[n_nodes, 3] = 1
                ndi[n_nodes, 4] = s0 ^ dsyn[i0, 0]
                n_nodes += 1
        else:
            p = ndi[v, 1]
            r = ndi[v, 2]
            i = order[p]
            if r + 1 < n_alt[i]:
                ndi[n_nodes, 0] = ndi[v, 0]
                ndi[n_nodes, 1] = p
                ndi[n_nodes, 2] = r + 1
                ndf[n_nodes, 0] = ndf[v, 0] + (wts[i, r + 1] - wts[i, r])
                ndf[n_nodes, 1] = ndf[v, 1] + (alt_d[i, r + 1] - alt_d[i, r])
                ndi[n_nodes, 3] = ndi[v, 3]
                ndi[n_nodes, 4] = ndi[v, 4] ^ dsyn[i, r] ^ dsyn[i, r + 1]
                n_nodes += 1
            if p + 1 < n_pos:
                j = order[p + 1]
                ndi[n_nodes, 0] = v
                ndi[n_nodes, 1] = p + 1
                ndi[n_nodes, 2] = 0
                ndf[n_nodes, 0] = ndf[v, 0] + wts[j, 0]
                ndf[n_nodes, 1] = ndf[v, 1] + alt_d[j, 0]
                ndi[n_nodes, 3] = ndi[v, 3] + 1
                ndi[n_nodes, 4] = ndi[v, 4] ^ dsyn[j, 0]
                n_nodes += 1
                if r == 0:
                    ndi[n_nodes, 0] = ndi[v, 0]
                    ndi[n_nodes, 1] = p + 1
                    ndi[n_nodes, 2] = 0
                    ndf[n_nodes, 0] = ndf[v, 0] + (wts[j, 0] - wts[i, 0])
                    ndf[n_nodes, 1] = ndf[v, 1] + (alt_d[j, 0] - alt_d[i, 0])
                    ndi[n_nodes, 3] = ndi[v, 3]
                    ndi[n_nodes, 4] = ndi[v, 4] ^ dsyn[i, 0] ^ dsyn[j, 0]
                    n_nodes += 1
        n_new = n_nodes - first_new
        for c in range(n_new):
            x = first_new + c
            wx = ndf[x, 0]
            tx = np.float64((ndi[x, 3] << NODE_BITS) | x)
            k = hsize
            hsize += 1
            while k > 0:
                par = (k - 1) // 4
                if _key_less(wx, tx, hp[par, 0], hp[par, 1]):
                    hp[k, 0] = hp[par, 0]
                    hp[k, 1] = hp[par, 1]
                    k = par
                else:
                    break
            hp[k, 0] = wx
            hp[k, 1] = tx

    return words[:n_found], log_pseq[:n_found], n_found, p_a, queries


@njit(cache=True)
def marginalize_core(words, log_pseq, p_a, logp):
    """Per-position APP: listed-codeword mass plus P(not in list) times the input belief."""
    P, Q = logp.shape
    n = words.shape[0]
    out = np.zeros((P, Q))
    if n == 0:
        for i in range(P):
            for m in range(Q):
                out[i, m] = np.exp(logp[i, m])
        return out, 1.0
    total = p_a
    for c in range(n):
        total += np.exp(log_pseq[c])
    p_nil = p_a / total
    for c in range(n):
        a = np.exp(log_pseq[c]) / total
        for i in range(P):
            out[i, words[c, i]] += a
    if p_nil > 0.0:
        for i in range(P):
            for m in range(Q):
                out[i, m] += p_nil * np.exp(logp[i, m])
    return out, p_nil


def sogrand_decode(logp, code_or_syn, n_list: int = 4, threshold: float = 1e-4,
                   max_queries: int = DEFAULT_MAX_QUERIES, mode: str = "exact",
                   ratio: float | None = None) -> SoftOutput:
    """Soft-output list decoding of one component word.

    ``code_or_syn`` is a :class:`~grouptpc.codes.ComponentCode` (its cells
    become positions when ``logp`` has 2^b columns, its bits when it has 2)
    or a precomputed syndrome table of the same shape as ``logp``. Decoding
    stops when ``n_list`` codewords are listed, when the not-in-list
    probability drops below ``threshold``, or after ``max_queries`` guesses.
    """
    if max_queries <= 0:
        raise ValueError("max_queries must be positive")
    if n_list < 1:
        raise ValueError("n_list must be >= 1")
    logp = np.ascontiguousarray(logp, dtype=float)
    if isinstance(code_or_syn, np.ndarray):
        syn = code_or_syn
        if ratio is None:
            raise ValueError("ratio is required with a raw syndrome table")
    else:
        code = code_or_syn
        width = code.b if logp.shape[1] == (1 << code.b) and logp.shape[0] == code.N else 1
        syn = code.syndrome_table(width)
        if ratio is None:
            ratio = list_ratio(code.k, code.n)
    if syn.shape != logp.shape:
        raise ValueError(f"input shape {logp.shape} does not match the code {syn.shape}")
    hard_decision(logp)
    words, lps, n_found, p_a, queries = sogrand_core(
        logp, syn, n_list, threshold, max_queries, PATTERN_MODES[mode], ratio
    )
    total = p_a + np.exp(lps).sum()
    if n_found == 0:
        return SoftOutput(words, np.zeros(0), 1.0, int(queries), lps)
    return SoftOutput(words, np.exp(lps) / total, float(p_a / total), int(queries), lps)


def marginalize_app(so: SoftOutput, logp) -> np.ndarray:
    """Per-position APP distributions, shape (P, Q)."""
    logp = np.ascontiguousarray(logp, dtype=float)
    if len(so) == 0:
        return np.exp(logp)
    out = np.exp(logp) * so.p_not_in_list
    for w, a in zip(so.words, so.app):
        out[np.arange(len(w)), w] += a
    return out


def llrs_to_logp(llr) -> np.ndarray:
    """Bit LLRs -> (n, 2) log-probabilities of values 0 and 1."""
    llr = np.asarray(llr, dtype=float)
    return np.stack([-np.logaddexp(0.0, -llr), -np.logaddexp(0.0, llr)], axis=-1)
