import numpy as np
import pytest
from scipy.stats import multivariate_normal

from grouptpc.channel import Constellation, bpsk, snr_to_sigma
from grouptpc.codes import code_from_generator, hamming74, random_linear_code
from grouptpc.inforate import (RateEstimate, endogenous_gap, endogenous_samples, exact_codeword_posterior,
                               h_noise, mc_info_rates, rate_gap, rate_samples, snr_threshold)
from oracles import ask_amplitudes, biawgn_threshold, sigma2_of, window_rates


def test_h_noise_examples():
    assert h_noise(1, 0.0, 1.0) == pytest.approx(0.5 * np.log(2 * np.pi * np.e))
    assert h_noise(2, 0.0, 1.0) == pytest.approx(np.log(2 * np.pi * np.e))
    C = 0.5 * 0.75 ** np.abs(np.subtract.outer(np.arange(3), np.arange(3)))
    assert h_noise(3, 0.75, 0.5) == pytest.approx(0.5 * np.log((2 * np.pi * np.e) ** 3 * np.linalg.det(C)))
    assert h_noise(3, 0.75, 0.5) == pytest.approx(multivariate_normal(np.zeros(3), C).entropy())
    with pytest.raises(ValueError):
        h_noise(0, 0.0, 1.0)


def test_rate_estimate_validation():
    r = RateEstimate.from_samples([1.0, 2.0, 3.0])
    assert r.value == 2.0 and r.std_error == pytest.approx(1 / np.sqrt(3))
    with pytest.raises(ValueError):
        RateEstimate(0.0, -1.0, 5)


@pytest.mark.parametrize("ell,esn0", [(1, 2.0), (1, 6.0), (2, 8.0)])
def test_rates_match_quadrature(ell, esn0):
    s2 = 1.0 / (2 * 10 ** (esn0 / 10))
    est = mc_info_rates(Constellation(ell), 0.75, s2, 2, L=200_000, seed=ell)
    want = window_rates(ask_amplitudes(ell), 0.75, s2)
    for e, w in zip(est, want):
        assert abs(e.value - w) < 4 * e.std_error + 1e-6


def test_entropy_and_posterior_forms_agree():
    c = Constellation(2)
    s2 = snr_to_sigma(6.0, 0.9, 2)
    post = mc_info_rates(c, 0.75, s2, 2, L=100_000, seed=3)
    ent = mc_info_rates(c, 0.75, s2, 2, L=100_000, seed=3, method="entropy")
    for a, b in zip(post, ent):
        assert abs(a.value - b.value) < 4 * max(a.std_error, b.std_error)


def test_ordering_bpsk_l1e6():
    s2 = 1.0 / (2 * 10**0.2)
    s = rate_samples(bpsk(), 0.75, s2, 2, 1_000_000, seed=11)
    for hi, lo in (("gw", "bw"), ("bw", "bs")):
        gap = rate_gap(s, hi, lo)
        assert gap.value > 3 * gap.std_error


def test_memoryless_and_noiseless_limits():
    c = Constellation(2)
    s = rate_samples(c, 0.0, 0.2, 2, 20_000, seed=1)
    assert np.allclose(s["gw"], s["bw"]) and np.allclose(s["gw"], s["bs"])
    hi = mc_info_rates(c, 0.75, 1e-4, 2, L=5000)
    assert all(r.value == pytest.approx(1.0, abs=1e-6) for r in hi)


def test_qam_rate_equals_ask_rate_per_bit():
    s2 = 0.05
    qam = mc_info_rates(Constellation(4, "qam"), 0.5, s2 / 2, 2, L=20_000, seed=5)
    ask = mc_info_rates(Constellation(2), 0.5, s2, 2, L=20_000, seed=5)
    # per-dimension variance s2/2 on amplitudes scaled by 1/sqrt(2) is the 4-ASK channel at s2
    for q, a in zip(qam, ask):
        assert q.value == pytest.approx(a.value, abs=1e-12)


def test_standard_error_scaling():
    c = Constellation(2)
    s2 = snr_to_sigma(5.0, 0.9, 2)
    a = mc_info_rates(c, 0.75, s2, 2, L=50_000, seed=1)[0]
    b = mc_info_rates(c, 0.75, s2, 2, L=100_000, seed=2)[0]
    assert a.std_error / b.std_error == pytest.approx(np.sqrt(2), rel=0.1)
    with pytest.raises(ValueError):
        mc_info_rates(c, 0.75, s2, 2, L=999)


def test_rate_bounds():
    s = rate_samples(Constellation(2), 0.75, 0.3, 3, 10_000, seed=2)
    for v in s.values():
        # per-window rate in bits per coded bit is at most 1 (entropies are nonnegative)
        assert np.all(v <= 1.0 + 1e-12)


def test_threshold_biawgn_oracle():
    t = snr_threshold("gw", bpsk(), 0.0, 1, 0.5, seed=1, L=400_000)
    assert t == pytest.approx(biawgn_threshold(0.5), abs=0.1)


def test_threshold_memoryless_agree_and_ordering():
    ts = [snr_threshold(s, bpsk(), 0.0, 2, 0.9, seed=2, L=200_000) for s in ("gw", "bw", "bs")]
    assert max(ts) - min(ts) <= 0.05
    c = Constellation(2)
    t = [snr_threshold(s, c, 0.75, 2, 0.9, seed=3, L=100_000) for s in ("gw", "bw", "bs")]
    assert t[0] <= t[1] <= t[2]
    with pytest.raises(ValueError, match="rate unreachable in bracket"):
        snr_threshold("gw", c, 0.75, 2, 0.9, L=10_000, lo=15.0, hi=20.0)


def test_threshold_gains_match_quadrature():
    """Monte Carlo thresholds reproduce the quadrature thresholds within 0.05 dB."""
    from scipy.optimize import brentq

    for ell in (1, 2):
        lv = ask_amplitudes(ell)
        want = [brentq(lambda e: window_rates(lv, 0.75, sigma2_of(e, 0.9, ell))[k] - 0.9, -2, 20, xtol=1e-4)
                for k in range(3)]
        got = [snr_threshold(s, Constellation(ell), 0.75, 2, 0.9, seed=4, L=200_000) for s in ("gw", "bw", "bs")]
        assert np.allclose(got, want, atol=0.05)


def test_exact_codeword_posterior():
    assert exact_codeword_posterior([0.3, -0.2], np.array([[0, 1]]), 0.5)[0] == 1.0
    assert np.allclose(exact_codeword_posterior([0.0, 0.0], np.array([[0, 0], [1, 1]]), 0.7), 0.5)
    ham = hamming74()
    book = ham.codebook().astype(float)
    rng = np.random.default_rng(0)
    y = rng.normal(0.5, 1.0, 7)
    s2 = 0.6
    dens = np.array([np.prod(np.exp(-(y - (1 - 2 * c)) ** 2 / (2 * s2))) for c in book])
    assert np.allclose(exact_codeword_posterior(y, ham, s2), dens / dens.sum())
    with pytest.raises(ValueError):
        exact_codeword_posterior(np.zeros(30), random_linear_code(30, 21, 0), 1.0)


def test_endogenous_full_space_has_no_gap():
    smp = endogenous_samples((6, 6), 3.0, [2, 3], 200, seed=1)
    for g, (hg, hb) in smp.items():
        assert np.allclose(hg, hb, atol=1e-9)


def test_endogenous_repetition_groups():
    rep = code_from_generator([[1, 1, 1]])
    hg, hb = endogenous_samples(rep, 1.0, [3], 300, seed=2)[3]
    # only 000 and 111 carry mass, so the group entropy is at most one bit
    assert np.all(hg <= 1.0 + 1e-12) and np.all(hb >= hg - 1e-12)
    assert np.allclose(hb, 3 * hg)


def test_endogenous_gap_nonnegative_and_errors():
    ig, ib = endogenous_gap(random_linear_code(12, 6, 0), 3.0, 3, L=500, seed=1)
    assert ig.value >= ib.value and 0 <= ib.value <= 1
    with pytest.raises(ValueError):
        endogenous_samples((30, 25), 3.0, [2], 10)
    with pytest.raises(ValueError):
        endogenous_samples((8, 4), 3.0, [9], 10)
