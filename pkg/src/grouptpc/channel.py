"""Gray-labelled ASK/QAM, the two-tap ISI channel, its linear equalizer and Gauss-Markov noise.

Noise variances are per real component. ASK signals are simulated as real
sequences (the quadrature noise carries no information about them).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.signal import lfilter


def gray(p: int) -> int:
    return p ^ (p >> 1)


def ask_levels(ell: int) -> tuple[np.ndarray, float]:
    """Unit-energy 2^ell-ASK amplitudes indexed by Gray label, and the scale ``a``.

    Labels are binary-reflected Gray over ascending amplitudes, MSB first,
    except 2-ASK which is BPSK with bit 0 -> +1.
    """
    M = 1 << ell
    a = float(np.sqrt(3.0 / (M * M - 1)))
    if ell == 1:
        return np.array([1.0, -1.0]), a
    levels = np.empty(M)
    for p in range(M):
        levels[gray(p)] = (2 * p + 1 - M) * a
    return levels, a


@dataclass(frozen=True)
class Constellation:
    """``points[L]`` is the symbol carrying the ell-bit label ``L`` (MSB = first bit)."""

    ell: int
    kind: str = "ask"
    points: np.ndarray = field(init=False, repr=False, compare=False)
    a: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("ask", "qam"):
            raise ValueError(f"unknown constellation kind {self.kind!r}")
        if self.ell < 1 or (self.kind == "qam" and self.ell % 2):
            raise ValueError(f"invalid bits per symbol {self.ell} for {self.kind}")
        if self.kind == "ask":
            pts, a = ask_levels(self.ell)
        else:
            h = self.ell // 2
            lv, a = ask_levels(h)
            a = a / np.sqrt(2.0)
            lab = np.arange(1 << self.ell)
            pts = (lv[lab >> h] + 1j * lv[lab & ((1 << h) - 1)]) / np.sqrt(2.0)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "a", a)

    @property
    def M(self) -> int:
        return 1 << self.ell

    @property
    def is_complex(self) -> bool:
        return self.kind == "qam"

    @property
    def n_dims(self) -> int:
        return 2 if self.kind == "qam" else 1

    @property
    def dim_bits(self) -> int:
        """Label bits carried by each real dimension."""
        return self.ell // self.n_dims

    @cached_property
    def dim_levels(self) -> np.ndarray:
        """Real amplitudes of one dimension indexed by that dimension's label."""
        if self.kind == "ask":
            return self.points.real.copy()
        return ask_levels(self.dim_bits)[0] / np.sqrt(2.0)

    def label_bits(self, label: int) -> np.ndarray:
        return np.array([(label >> (self.ell - 1 - t)) & 1 for t in range(self.ell)], dtype=np.uint8)


def bpsk() -> Constellation:
    return Constellation(1, "ask")


@dataclass(frozen=True)
class ChannelParams:
    """``sigma2`` is the stationary per-component variance of the equalized noise."""

    rho: float
    sigma2: float
    seed: int | None = None

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"|rho| must be < 1, got {self.rho}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def sigma2_isi(self) -> float:
        """Per-component variance of the white noise ahead of the equalizer."""
        return self.sigma2 * (1.0 - self.rho**2)


def _rng(p: ChannelParams, rng):
    return rng if rng is not None else np.random.default_rng(p.seed)


def modulate(bits, c: Constellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % c.ell:
        raise ValueError(f"{bits.size} bits do not split into {c.ell}-bit symbols")
    groups = bits.reshape(-1, c.ell)
    labels = groups @ (1 << np.arange(c.ell - 1, -1, -1))
    return c.points[labels]


def labels_of(bits, c: Constellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).reshape(-1, c.ell)
    return bits @ (1 << np.arange(c.ell - 1, -1, -1))


def _white(n: int, sigma2: float, rng, complex_: bool) -> np.ndarray:
    s = np.sqrt(sigma2)
    if complex_:
        w = rng.standard_normal((2, n))
        return s * (w[0] + 1j * w[1])
    return s * rng.standard_normal(n)


def isi_channel(x, p: ChannelParams, rng=None, noise: bool = True) -> np.ndarray:
    """Two-tap ISI with white noise: Y~_i = X_i - rho X_{i-1} + Z~_i, X_0 = 0.

    The tap sign makes the channel transfer function 1 - rho z^-1, which
    :func:`equalize` inverts exactly; Z~ has variance sigma2 (1 - rho^2) so the
    equalized noise is Gauss-Markov with variance sigma2.
    """
    x = np.asarray(x)
    rng = _rng(p, rng)
    prev = np.concatenate([np.zeros(1, dtype=x.dtype), x[:-1]])
    out = x - p.rho * prev
    if noise:
        out = out + _white(x.size, p.sigma2_isi, rng, np.iscomplexobj(x))
    return out


def equalize(ytilde, rho: float) -> np.ndarray:
    """Inverse filter 1/(1 - rho z^-1): y_i = y~_i + rho y_{i-1}, y_0 = 0."""
    ytilde = np.asarray(ytilde)
    return lfilter([1.0], [1.0, -rho], ytilde)


def gauss_markov_noise(n: int, rho: float, sigma2: float, rng, complex_: bool = False) -> np.ndarray:
    """Stationary AR(1) noise with autocovariance sigma2 * rho^|tau| per component."""
    if complex_:
        return (gauss_markov_noise(n, rho, sigma2, rng)
                + 1j * gauss_markov_noise(n, rho, sigma2, rng))
    w = rng.standard_normal(n)
    s = np.sqrt(sigma2)
    e = s * np.sqrt(1.0 - rho * rho) * w
    if n:
        e[0] = s * w[0]
    return lfilter([1.0], [1.0, -rho], e)


def gauss_markov_channel(x, p: ChannelParams, rng=None) -> np.ndarray:
    x = np.asarray(x)
    rng = _rng(p, rng)
    return x + gauss_markov_noise(x.size, p.rho, p.sigma2, rng, np.iscomplexobj(x))


def snr_to_sigma(eb_n0_db: float, rate: float, ell: int) -> float:
    """sigma^2 with Es/N0 = 1/(2 sigma^2) = rate * ell * Eb/N0."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    return 1.0 / (2.0 * rate * ell * 10.0 ** (eb_n0_db / 10.0))


def sigma_to_snr(sigma2: float, rate: float, ell: int) -> float:
    """Inverse of :func:`snr_to_sigma`, in dB."""
    return 10.0 * np.log10(1.0 / (2.0 * rate * ell * sigma2))
