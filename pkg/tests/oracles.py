"""Deterministic quadrature oracles for the information-rate estimators.

Everything here is written from the textbook definitions and imports nothing
from the package; amplitudes and the SNR mapping are restated.
"""

import itertools

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp


def ask_amplitudes(ell: int) -> np.ndarray:
    """Unit-energy ASK amplitudes (labels do not matter for symbol-level rates)."""
    M = 1 << ell
    return (2 * np.arange(M) + 1 - M) * np.sqrt(3.0 / (M * M - 1))


def sigma2_of(ebn0_db: float, rate: float, ell: int) -> float:
    return 1.0 / (2.0 * rate * ell * 10 ** (ebn0_db / 10))


def window_rates(levels, rho: float, sigma2: float, nq: int = 48) -> np.ndarray:
    """(I_gw, I_bw, I_bs) in bits per coded bit for g = 2 by Gauss-Hermite quadrature."""
    levels = np.asarray(levels, dtype=float)
    M = len(levels)
    t, w = np.polynomial.hermite_e.hermegauss(nq)
    w = w / w.sum()
    C = sigma2 * np.array([[1.0, rho], [rho, 1.0]])
    Ci = np.linalg.inv(C)
    tup = np.array(list(itertools.product(range(M), repeat=2)))
    X = levels[tup]
    U = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
    W = np.outer(w, w).reshape(-1)
    Z = U @ np.linalg.cholesky(C).T
    hy = hyx = 0.0
    for a, x in enumerate(X):
        d = (x + Z)[:, None, :] - X[None, :, :]
        lp = -0.5 * np.einsum("qki,ij,qkj->qk", d, Ci, d)
        hy -= (W * (logsumexp(lp, axis=1) - np.log(M * M))).sum() / M**2
        for i in range(2):
            sel = tup[:, i] == tup[a, i]
            hyx -= (W * (logsumexp(lp[:, sel], axis=1) - np.log(M))).sum() / M**2 / 2
    # the dropped normalizing constant cancels; E[z^T C^-1 z] / 2 = 1 for g = 2
    i_gw = (hy - 1.0) / 2
    i_bw = hy - hyx
    t1, w1 = np.polynomial.hermite_e.hermegauss(200)
    w1 = w1 / w1.sum()
    h1 = 0.0
    for x in levels:
        y = x + np.sqrt(sigma2) * t1
        h1 -= (w1 * (logsumexp(-((y[:, None] - levels) ** 2) / (2 * sigma2), axis=1) - np.log(M))).sum() / M
    i_bs = h1 - 0.5
    return np.array([i_gw, i_bw, i_bs]) / np.log(2) / np.log2(M)


def biawgn_capacity(sigma2: float, nq: int = 200) -> float:
    """Capacity of BPSK over AWGN in bits: 1 - E[log2(1 + exp(-2 Y / sigma2))], Y ~ N(1, sigma2)."""
    t, w = np.polynomial.hermite_e.hermegauss(nq)
    w = w / w.sum()
    y = 1.0 + np.sqrt(sigma2) * t
    return 1.0 - float((w * np.logaddexp(0.0, -2.0 * y / sigma2)).sum() / np.log(2))


def biawgn_threshold(rate: float) -> float:
    """Eb/N0 (dB) at which the BI-AWGN capacity equals ``rate``."""
    return brentq(lambda e: biawgn_capacity(sigma2_of(e, rate, 1)) - rate, -5, 15, xtol=1e-6)
