"""Channel posteriors for the three preprocessing schemes and their conversion to cell beliefs.

gw
    joint posterior of the g symbols of a window (one window per cell);
bw
    per-symbol marginals of the gw posterior;
bs
    symbol-by-symbol posteriors that ignore the noise correlation.

A cell of ``b = g * ell`` bits is indexed by the integer ``mu`` whose bit
``i*ell + t`` is bit ``t`` (MSB first) of the label of symbol ``i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .channel import ChannelParams, Constellation

LLR_CLAMP = 40.0


def mvn_logpdf(z, rho: float, sigma2: float) -> np.ndarray:
    """Log-density of zero-mean AR(1) vectors with covariance sigma2 * rho^|i-j|.

    ``z`` has shape (..., g). Uses the innovation form of the tridiagonal inverse.
    """
    if not -1.0 < rho < 1.0:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    z = np.asarray(z, dtype=float)
    g = z.shape[-1]
    innov = 1.0 - rho * rho
    quad = z[..., 0] ** 2 / sigma2
    if g > 1:
        quad = quad + ((z[..., 1:] - rho * z[..., :-1]) ** 2).sum(axis=-1) / (sigma2 * innov)
    logdet = g * np.log(sigma2) + (g - 1) * np.log(innov)
    return -0.5 * (g * np.log(2.0 * np.pi) + logdet + quad)


@lru_cache(maxsize=None)
def _tuples(M: int, g: int) -> np.ndarray:
    """All label tuples in lexicographic order, shape (M^g, g)."""
    return np.array(list(itertools.product(range(M), repeat=g)), dtype=np.int64).reshape(-1, g)


@lru_cache(maxsize=None)
def _dim_partial_mu(ell: int, dim_bits: int, offset: int, g: int) -> np.ndarray:
    """Cell index bits contributed by one real dimension for each of its label tuples."""
    tup = _tuples(1 << dim_bits, g)
    mu = np.zeros(len(tup), dtype=np.int64)
    for i in range(g):
        for t in range(dim_bits):
            bit = (tup[:, i] >> (dim_bits - 1 - t)) & 1
            mu |= bit << (i * ell + offset + t)
    return mu


def window_loglik(y_dim, levels, rho: float, sigma2: float) -> np.ndarray:
    """Unnormalized log p_Z(y - x) for every label tuple of one real dimension.

    ``y_dim`` has shape (n_windows, g); returns (n_windows, M^g).
    """
    y_dim = np.asarray(y_dim, dtype=float)
    g = y_dim.shape[-1]
    x = levels[_tuples(len(levels), g)]
    return mvn_logpdf(y_dim[:, None, :] - x[None, :, :], rho, sigma2)


def _dims(y, c: Constellation) -> list[np.ndarray]:
    y = np.asarray(y)
    if c.is_complex:
        return [y.real, y.imag]
    return [y.real if np.iscomplexobj(y) else y]


def group_logprobs(y, c: Constellation, rho: float, sigma2: float, g: int, scheme: str = "gw") -> np.ndarray:
    """Normalized log-probabilities of every cell group, shape (n_cells, 2^(g*ell)).

    ``y`` holds the equalized symbols, g consecutive symbols per cell. For
    ``bw`` and ``bs`` the group distribution is the product of the per-symbol
    posteriors, so marginalizing it to bits yields exactly the bit LLRs of
    those schemes.
    """
    if scheme not in ("gw", "bw", "bs"):
        raise ValueError(f"unknown preprocessing scheme {scheme!r}")
    y = np.asarray(y)
    if y.size % g:
        raise ValueError(f"{y.size} symbols do not split into windows of {g}")
    db = c.dim_bits
    out = None
    for d, yd in enumerate(_dims(y, c)):
        yw = yd.reshape(-1, g)
        if scheme == "bs":
            ll = window_loglik(yw, c.dim_levels, 0.0, sigma2)
        else:
            ll = window_loglik(yw, c.dim_levels, rho, sigma2)
        ll = ll - logsumexp(ll, axis=1, keepdims=True)
        if scheme == "bw":
            ll = _product_of_marginals(ll, 1 << db, g)
        pmu = _dim_partial_mu(c.ell, db, d * db, g)
        if out is None:
            out = np.full((yw.shape[0], 1 << (g * c.ell)), -np.inf)
            out[:, pmu] = ll
        else:
            prev = out[:, _dim_partial_mu(c.ell, db, 0, g)]
            first = _dim_partial_mu(c.ell, db, 0, g)
            out[:, (first[:, None] | pmu[None, :]).reshape(-1)] = (
                prev[:, :, None] + ll[:, None, :]
            ).reshape(yw.shape[0], -1)
    return out


def _product_of_marginals(ll: np.ndarray, M: int, g: int) -> np.ndarray:
    """Replace a joint over M^g tuples by the product of its symbol marginals (log domain)."""
    n = ll.shape[0]
    joint = ll.reshape((n,) + (M,) * g)
    out = np.zeros_like(joint)
    for i in range(g):
        axes = tuple(1 + a for a in range(g) if a != i)
        marg = logsumexp(joint, axis=axes, keepdims=True)
        out = out + marg
    return out.reshape(n, -1)


@dataclass
class GroupPosterior:
    """Posterior over the symbol labels of one window; ``probs`` has shape (M,) * g."""

    probs: np.ndarray

    @property
    def g(self) -> int:
        return self.probs.ndim


def gw_posterior(y_window, c: Constellation, p: ChannelParams) -> GroupPosterior:
    y_window = np.atleast_1d(np.asarray(y_window))
    g = y_window.size
    lp = group_logprobs(y_window, c, p.rho, p.sigma2, g, "gw")[0]
    # reorder cell index -> label tuple
    probs = np.exp(lp[_label_tuple_to_mu(c, g)])
    return GroupPosterior(probs.reshape((c.M,) * g))


@lru_cache(maxsize=None)
def _label_tuple_to_mu_cached(ell: int, g: int) -> np.ndarray:
    tup = _tuples(1 << ell, g)
    mu = np.zeros(len(tup), dtype=np.int64)
    for i in range(g):
        for t in range(ell):
            mu |= ((tup[:, i] >> (ell - 1 - t)) & 1) << (i * ell + t)
    return mu


def _label_tuple_to_mu(c: Constellation, g: int) -> np.ndarray:
    return _label_tuple_to_mu_cached(c.ell, g)


def bw_posterior(gp: GroupPosterior) -> list[np.ndarray]:
    g = gp.g
    return [gp.probs.sum(axis=tuple(a for a in range(g) if a != i)) for i in range(g)]


def bs_posterior(y, c: Constellation, sigma2: float) -> np.ndarray:
    """Symbol posterior over labels, proportional to exp(-|y - x|^2 / (2 sigma2))."""
    d2 = np.abs(y - c.points) ** 2
    lp = -d2 / (2.0 * sigma2)
    lp -= logsumexp(lp)
    return np.exp(lp)


def symbol_to_bit_llrs(dist, c: Constellation) -> np.ndarray:
    """log P(bit=0) - log P(bit=1) for each label bit, MSB first, clamped to +-40."""
    dist = np.asarray(dist, dtype=float)
    labels = np.arange(c.M)
    out = np.empty(c.ell)
    with np.errstate(divide="ignore"):
        for t in range(c.ell):
            bit = (labels >> (c.ell - 1 - t)) & 1
            p0 = dist[bit == 0].sum()
            p1 = dist[bit == 1].sum()
            out[t] = np.log(p0) - np.log(p1)
    return np.clip(np.nan_to_num(out, nan=0.0, posinf=LLR_CLAMP, neginf=-LLR_CLAMP), -LLR_CLAMP, LLR_CLAMP)


def group_to_bit_llrs(logp) -> np.ndarray:
    """Bit LLRs of each cell from its group log-probabilities; (n, 2^b) -> (n, b)."""
    logp = np.asarray(logp, dtype=float)
    Q = logp.shape[-1]
    b = Q.bit_length() - 1
    mu = np.arange(Q)
    out = np.empty(logp.shape[:-1] + (b,))
    for s in range(b):
        one = ((mu >> s) & 1).astype(bool)
        out[..., s] = logsumexp(logp[..., ~one], axis=-1) - logsumexp(logp[..., one], axis=-1)
    return np.clip(np.nan_to_num(out, nan=0.0), -LLR_CLAMP, LLR_CLAMP)


def truncate_top(logp, n_B: int) -> np.ndarray:
    """Keep the n_B most probable groups per row (ties: lower group value), renormalize."""
    if n_B < 1:
        raise ValueError(f"n_B must be >= 1, got {n_B}")
    logp = np.asarray(logp, dtype=float)
    Q = logp.shape[-1]
    if n_B >= Q:
        return logp - logsumexp(logp, axis=-1, keepdims=True)
    flat = logp.reshape(-1, Q)
    order = np.argsort(-flat, axis=1, kind="stable")
    out = np.full_like(flat, -np.inf)
    keep = order[:, :n_B]
    rows = np.arange(flat.shape[0])[:, None]
    out[rows, keep] = flat[rows, keep]
    out -= logsumexp(out, axis=1, keepdims=True)
    return out.reshape(logp.shape)


@dataclass
class CellBelief:
    """Truncated belief over b-bit groups; ``support`` holds group values ``mu``."""

    support: np.ndarray
    logp: np.ndarray

    def dense(self, b: int) -> np.ndarray:
        out = np.full(1 << b, -np.inf)
        out[self.support] = self.logp
        return out


def cell_beliefs_from_groups(gps, c: Constellation, n_B: int) -> tuple[list[CellBelief], list[CellBelief]]:
    """Channel beliefs (top n_B groups, renormalized) and uniform a-priori beliefs per cell.

    ``gps`` is a sequence of :class:`GroupPosterior` (one per cell) or an
    array of cell group log-probabilities of shape (n_cells, 2^b).
    """
    if n_B < 1:
        raise ValueError(f"n_B must be >= 1, got {n_B}")
    if isinstance(gps, np.ndarray):
        dense = gps
    else:
        rows = []
        for gp in gps:
            lp = np.full(c.M**gp.g, -np.inf)
            with np.errstate(divide="ignore"):
                lp[_label_tuple_to_mu(c, gp.g)] = np.log(gp.probs.reshape(-1))
            rows.append(lp)
        dense = np.array(rows)
    trunc = truncate_top(dense, n_B)
    ch, prior = [], []
    for row in trunc:
        sup = np.nonzero(np.isfinite(row))[0]
        ch.append(CellBelief(sup, row[sup]))
        prior.append(CellBelief(sup.copy(), np.full(sup.size, -np.log(sup.size))))
    return ch, prior


def marginal_group(app, positions, n: int) -> np.ndarray:
    """Distribution of the bits at ``positions`` under a codeword distribution.

    ``app`` maps codewords (bit tuples of length n) to probabilities. The
    result is indexed by group value with ``positions[0]`` as the LSB.
    """
    out = np.zeros(1 << len(positions))
    for word, pr in app.items():
        if len(word) != n:
            raise ValueError("codeword length mismatch")
        mu = sum(int(word[p]) << s for s, p in enumerate(positions))
        out[mu] += pr
    return out
