"""Monte Carlo achievable-rate estimates for the gw / bw / bs preprocessing schemes.

Rates are mismatched-decoding rates with uniform i.i.d. symbols. Everything is
computed in nats and reported in bits per coded bit. The default estimator
averages ``log P(x | y)`` of the transmitted symbols under each scheme's
posterior, which equals the entropy form ``(h(Y) - h(Y | X)) / g`` in
expectation but has far lower variance; ``method="entropy"`` evaluates the
entropy form literally, with ``h(Z)`` in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .belief import window_loglik
from .channel import Constellation, ask_levels, snr_to_sigma
from .codes import ComponentCode

LN2 = np.log(2.0)
CHUNK = 1 << 16
SCHEMES = ("gw", "bw", "bs")


@dataclass(frozen=True)
class RateEstimate:
    """Sample mean and its standard error; ``per_symbol`` flags bits per modulation symbol."""

    value: float
    std_error: float
    samples: int
    per_symbol: bool = False

    def __post_init__(self):
        if self.std_error < 0 or self.samples < 1:
            raise ValueError("need std_error >= 0 and samples >= 1")

    @classmethod
    def from_samples(cls, x, per_symbol: bool = False) -> "RateEstimate":
        x = np.asarray(x, dtype=float)
        se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
        return cls(float(x.mean()), se, int(x.size), per_symbol)


def h_noise(g: int, rho: float, sigma2: float) -> float:
    """Differential entropy (nats) of g consecutive AR(1) noise samples of variance sigma2.

    det C = sigma2^g (1 - rho^2)^(g-1).
    """
    if g < 1:
        raise ValueError(f"g must be >= 1, got {g}")
    if not -1.0 < rho < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    logdet = g * np.log(sigma2) + (g - 1) * np.log1p(-rho * rho)
    return 0.5 * (g * np.log(2.0 * np.pi * np.e) + logdet)


def _ask_dimension(c: Constellation) -> tuple[np.ndarray, int]:
    """Real-dimension amplitudes (label order) and bits per dimension.

    A square QAM behaves as two independent ASKs, so its rate per coded bit
    equals that of the ASK carried on each axis.
    """
    if c.is_complex:
        lv, _ = ask_levels(c.ell // 2)
        return lv * np.sqrt(0.5), c.ell // 2
    return c.points.real.copy(), c.ell


def _key(seed, *more) -> list[int]:
    """Seed material for a counter-based substream; ``seed`` may be an int or a sequence."""
    return [int(v) for v in np.atleast_1d(seed)] + [int(m) for m in more]


def _draw(M: int, g: int, L: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Uniform label tuples and unit-variance AR(1)-innovation normals, both (L, g)."""
    labels = rng.integers(0, M, size=(L, g))
    w = rng.standard_normal((L, g))
    return labels, w


def _ar1(w: np.ndarray, rho: float, sigma2: float) -> np.ndarray:
    z = np.empty_like(w)
    s = np.sqrt(sigma2)
    z[:, 0] = s * w[:, 0]
    si = s * np.sqrt(1.0 - rho * rho)
    for i in range(1, w.shape[1]):
        z[:, i] = rho * z[:, i - 1] + si * w[:, i]
    return z


def _tuple_index(labels: np.ndarray, M: int) -> np.ndarray:
    g = labels.shape[1]
    return labels @ (M ** np.arange(g - 1, -1, -1))


def _symbol_logpost(y: np.ndarray, levels: np.ndarray, sigma2: float) -> np.ndarray:
    """(L, g, M) symbol-by-symbol log-posteriors ignoring the noise correlation."""
    ll = -((y[..., None] - levels) ** 2) / (2.0 * sigma2)
    return ll - logsumexp(ll, axis=-1, keepdims=True)


def _terms_posterior(levels, labels, y, rho, sigma2, schemes):
    """Per-window log-posterior terms in nats per symbol, before adding log M."""
    L, g = labels.shape
    M = len(levels)
    rows = np.arange(L)
    out = {}
    if "gw" in schemes or "bw" in schemes:
        ll = window_loglik(y, levels, rho, sigma2)
        lp = ll - logsumexp(ll, axis=1, keepdims=True)
        if "gw" in schemes:
            out["gw"] = lp[rows, _tuple_index(labels, M)] / g
        if "bw" in schemes:
            joint = lp.reshape((L,) + (M,) * g)
            acc = np.zeros(L)
            for i in range(g):
                axes = tuple(1 + a for a in range(g) if a != i)
                marg = logsumexp(joint, axis=axes) if axes else joint
                acc += marg[rows, labels[:, i]]
            out["bw"] = acc / g
    if "bs" in schemes:
        sp = _symbol_logpost(y, levels, sigma2)
        out["bs"] = np.take_along_axis(sp, labels[..., None], axis=-1)[..., 0].mean(axis=1)
    return out


def _terms_entropy(levels, labels, y, rho, sigma2, schemes):
    """Literal h(Y) - h(Y|X) form: -log of mixture densities, closed-form h(Z)."""
    L, g = labels.shape
    M = len(levels)
    logM = np.log(M)
    out = {}
    ll = window_loglik(y, levels, rho, sigma2)
    hy = g * logM - logsumexp(ll, axis=1)
    if "gw" in schemes:
        out["gw"] = (hy - h_noise(g, rho, sigma2)) / g - logM
    if "bw" in schemes:
        joint = ll.reshape((L,) + (M,) * g)
        rows = np.arange(L)
        acc = np.zeros(L)
        for i in range(g):
            axes = tuple(1 + a for a in range(g) if a != i)
            cond = logsumexp(joint, axis=axes) if axes else joint
            hyx = (g - 1) * logM - cond[rows, labels[:, i]]
            acc += hy - hyx
        out["bw"] = acc / g - logM
    if "bs" in schemes:
        l1 = -((y[..., None] - levels) ** 2) / (2.0 * sigma2) - 0.5 * np.log(2 * np.pi * sigma2)
        hy1 = logM - logsumexp(l1, axis=-1)
        out["bs"] = (hy1 - h_noise(1, 0.0, sigma2)).mean(axis=1) - logM
    return out


def rate_samples(c: Constellation, rho: float, sigma2: float, g: int, L: int, seed=0,
                 schemes=SCHEMES, method: str = "posterior",
                 draws=None) -> dict[str, np.ndarray]:
    """Per-window rate samples in bits per coded bit, one array of length L per scheme.

    All schemes share the same symbol and noise draws, so differences between
    their arrays are paired samples of the rate gaps.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if not -1.0 < rho < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    levels, bits = _ask_dimension(c)
    M = len(levels)
    terms = {"posterior": _terms_posterior, "entropy": _terms_entropy}[method]
    out = {s: np.empty(L) for s in schemes}
    for start in range(0, L, CHUNK):
        stop = min(start + CHUNK, L)
        if draws is not None:
            labels, w = draws[0][start:stop], draws[1][start:stop]
        else:
            labels, w = _draw(M, g, stop - start, np.random.default_rng(_key(seed, start // CHUNK)))
        y = levels[labels] + _ar1(w, rho, sigma2)
        t = terms(levels, labels, y, rho, sigma2, schemes)
        for s in schemes:
            out[s][start:stop] = (np.log(M) + t[s]) / LN2 / bits
    return out


def mc_info_rates(c: Constellation, rho: float, sigma2: float, g: int, L: int = 100_000,
                  seed=0, method: str = "posterior") -> tuple[RateEstimate, RateEstimate, RateEstimate]:
    """(I_gw, I_bw, I_bs) in bits per coded bit."""
    if L < 1000:
        raise ValueError(f"need at least 1000 samples, got {L}")
    s = rate_samples(c, rho, sigma2, g, L, seed, SCHEMES, method)
    return tuple(RateEstimate.from_samples(s[k]) for k in SCHEMES)


def rate_gap(samples: dict[str, np.ndarray], hi: str, lo: str) -> RateEstimate:
    """Paired estimate of I_hi - I_lo from :func:`rate_samples` output."""
    return RateEstimate.from_samples(samples[hi] - samples[lo])


def snr_threshold(scheme: str, c: Constellation, rho: float, g: int, rate: float, seed=0,
                  L: int = 100_000, lo: float = -2.0, hi: float = 20.0, tol: float = 0.01) -> float:
    """Smallest Eb/N0 (dB) whose estimated rate reaches ``rate``, by bisection.

    The symbol and noise draws are fixed across evaluations, which makes the
    estimated rate curve monotone in practice.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown preprocessing scheme {scheme!r}")
    if not 0.0 < rate < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {rate}")
    levels, bits = _ask_dimension(c)
    rng = np.random.default_rng(_key(seed, 1 << 20))
    draws = _draw(len(levels), g, L, rng)

    def f(ebn0):
        s2 = snr_to_sigma(ebn0, rate, c.ell)
        return rate_samples(c, rho, s2, g, L, seed, (scheme,), draws=draws)[scheme].mean()

    if not f(lo) < rate <= f(hi):
        raise ValueError("rate unreachable in bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= rate:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def exact_codeword_posterior(y, codebook, sigma2: float, max_k: int = 20) -> np.ndarray:
    """P(c | y) for every row of ``codebook`` under BPSK (0 -> +1) over BI-AWGN."""
    if isinstance(codebook, ComponentCode):
        codebook = codebook.codebook(max_k)
    codebook = np.asarray(codebook)
    if codebook.shape[0] > (1 << max_k):
        raise ValueError(f"codebook of {codebook.shape[0]} words is too large to enumerate")
    x = 1.0 - 2.0 * codebook
    ll = x @ np.asarray(y, dtype=float) / sigma2
    return np.exp(ll - logsumexp(ll))


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _messages(k: int) -> np.ndarray:
    idx = np.arange(1 << k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k)) & 1).astype(np.uint8)


def endogenous_samples(code, eb_n0_db: float, gs, L: int, seed=0) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Per-trial group and summed bit entropies (bits) of the first window, for each g in ``gs``.

    ``code`` is a binary :class:`ComponentCode`, or an ``(n, k)`` pair to draw a
    fresh random linear code for every trial.
    """
    if isinstance(code, ComponentCode):
        if code.b != 1:
            raise ValueError("the endogenous experiment needs a binary code (b=1)")
        n, k = code.n, code.k
    else:
        n, k = code
    if k > 20:
        raise ValueError(f"codebook of 2^{k} words is too large to enumerate")
    gs = list(gs)
    if any(not 1 <= g <= n for g in gs):
        raise ValueError("window size g must lie in 1..n")
    sigma2 = snr_to_sigma(eb_n0_db, k / n, 1)
    msgs = _messages(k).astype(np.float64)
    book = None if not isinstance(code, ComponentCode) else code.codebook()
    out = {g: (np.empty(L), np.empty(L)) for g in gs}
    for t in range(L):
        rng = np.random.default_rng(_key(seed, t))
        if book is None:
            P = rng.integers(0, 2, size=(k, n - k))
            parity = (msgs @ P).astype(np.int64) & 1
            cb = np.concatenate([msgs.astype(np.int64), parity], axis=1)
        else:
            cb = book
        sent = cb[rng.integers(0, cb.shape[0])]
        y = (1.0 - 2.0 * sent) + np.sqrt(sigma2) * rng.standard_normal(n)
        post = exact_codeword_posterior(y, cb, sigma2)
        for g in gs:
            grp = cb[:, :g] @ (1 << np.arange(g))
            pg = np.bincount(grp, weights=post, minlength=1 << g)
            p1 = np.clip(post @ cb[:, :g], 0.0, 1.0)
            hb = sum(_entropy_bits(np.array([1 - q, q])) for q in p1)
            out[g][0][t] = _entropy_bits(pg)
            out[g][1][t] = hb
    return out


def endogenous_gap(code, eb_n0_db: float, g: int, L: int = 20_000, seed=0) -> tuple[RateEstimate, RateEstimate]:
    """(I_g, I_b) in bits per coded bit for the first window of g bits."""
    hg, hb = endogenous_samples(code, eb_n0_db, [g], L, seed)[g]
    return RateEstimate.from_samples(1.0 - hg / g), RateEstimate.from_samples(1.0 - hb / g)

