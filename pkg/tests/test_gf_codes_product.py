import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grouptpc.codes import (binary_image_H, code_from_generator, extend_rs, gf2_rank, hamming74,
                            is_codeword, make_code, random_linear_code, rs_code, rs_encode_systematic)
from grouptpc.gf import (PRIMITIVE_POLYS, bits_to_elem, elem_to_bits, gf_add, gf_inv, gf_mul,
                         make_field, poly_eval)
from grouptpc.product import (ProductWord, deserialize_cells, encode, encode_cells, invalid_lines,
                              is_valid, product_rate, serialize_cells)

GF8 = make_field(3)
GF16 = make_field(4)


def _clmul_mod(a, c, poly, b):
    """Carry-less multiplication followed by reduction: an oracle independent of the tables."""
    r = 0
    for s in range(b):
        if (c >> s) & 1:
            r ^= a << s
    for s in range(2 * b - 2, b - 1, -1):
        if (r >> s) & 1:
            r ^= poly << (s - b)
    return r


# --- gf --------------------------------------------------------------------

def test_gf_examples():
    assert gf_add(0b101, 0b101) == 0
    assert gf_add(0b101, 0) == 0b101
    assert gf_add(0b011, 0b110) == 0b101
    assert gf_mul(0b010, 0b010, GF8) == 0b100
    assert gf_mul(0b100, 0b010, GF8) == 0b011
    assert gf_mul(5, 0, GF8) == 0
    assert gf_inv(1, GF8) == 1
    assert gf_inv(0b010, GF8) == GF8.alpha_pow(6)
    assert list(elem_to_bits(0, GF8)) == [0, 0, 0]
    assert list(elem_to_bits(0b011, GF8)) == [1, 1, 0]


def test_gf_pinned_polynomials():
    assert GF8.prim_poly == 0b1011 and GF16.prim_poly == 0b10011


def test_gf_errors():
    with pytest.raises(ZeroDivisionError, match="no inverse of zero"):
        gf_inv(0, GF8)
    with pytest.raises(ValueError):
        bits_to_elem([1, 0], GF8)
    with pytest.raises(ValueError):
        make_field(3, 0b1111)  # x^3+x^2+x+1 = (x+1)^3 is not primitive
    with pytest.raises(ValueError):
        make_field(9)


@pytest.mark.parametrize("b", range(1, 9))
def test_gf_tables_match_clmul_oracle(b):
    f = make_field(b)
    rng = np.random.default_rng(b)
    pairs = rng.integers(0, 1 << b, size=(300, 2))
    for a, c in pairs:
        assert gf_mul(int(a), int(c), f) == _clmul_mod(int(a), int(c), PRIMITIVE_POLYS[b], b)
    for e in range(1, 1 << b):
        assert f.antilog_table[f.log_table[e]] == e


def test_gf16_exhaustive_inverse_and_roundtrip():
    for a in range(1, 16):
        assert gf_mul(a, gf_inv(a, GF16), GF16) == 1
    for a in range(16):
        assert bits_to_elem(elem_to_bits(a, GF16), GF16) == a


@given(st.integers(0, 15), st.integers(0, 15))
def test_binary_image_is_linear(a, c):
    assert np.array_equal(elem_to_bits(a ^ c, GF16), elem_to_bits(a, GF16) ^ elem_to_bits(c, GF16))


# --- codes -----------------------------------------------------------------

def _rs_codebook(code):
    return np.array([rs_encode_systematic(code, m)
                     for m in itertools.product(range(code.field.q), repeat=code.K)])


def test_rs_generator_and_distance():
    c75 = rs_code(5, GF8)
    assert (c75.N, c75.K) == (7, 5) and len(c75.gen_poly) == 3
    c73 = rs_code(3, GF8)
    g = list(c73.gen_poly)
    for i in range(1, 5):
        assert poly_eval(g, GF8.alpha_pow(i), GF8) == 0
    book = _rs_codebook(c73)
    assert len(book) == 512
    weights = (book != 0).sum(axis=1)
    assert weights[weights > 0].min() == 5


def test_rs_errors():
    with pytest.raises(ValueError):
        rs_code(7, GF8)
    with pytest.raises(ValueError):
        rs_encode_systematic(rs_code(5, GF8), [1, 2, 3])


def test_rs_systematic_and_syndrome():
    code = rs_code(5, GF8)
    rng = np.random.default_rng(0)
    assert not np.any(rs_encode_systematic(code, [0] * 5))
    for _ in range(10):
        msg = rng.integers(0, 8, 5)
        cw = rs_encode_systematic(code, msg)
        assert np.array_equal(cw[:5], msg)
        bits = np.concatenate([elem_to_bits(int(s), GF8) for s in cw])
        assert is_codeword(code, bits)


@pytest.mark.parametrize("K", [3, 4, 5])
def test_rs_codebook_linear_and_complete(K):
    code = rs_code(K, GF8)
    book = _rs_codebook(code)
    assert len({tuple(w) for w in book}) == 8**K
    rng = np.random.default_rng(K)
    H = code.H_bin.astype(np.int64)
    for _ in range(50):
        a, c = book[rng.integers(len(book), size=2)]
        s = a ^ c
        bits = ((s[:, None] >> np.arange(3)) & 1).reshape(-1)
        assert not np.any(H @ bits % 2)


def test_binary_image_dimensions_and_rank():
    c75 = rs_code(5, GF8)
    H = binary_image_H(c75)
    assert H.shape == (6, 21) and gf2_rank(H) == 6
    e = extend_rs(rs_code(14, GF16))
    assert e.H_bin.shape == (8, 64) and gf2_rank(e.H_bin) == 8
    assert gf2_rank(e.G_bin) == e.k and not np.any(e.G_bin.astype(int) @ e.H_bin.T.astype(int) % 2)


def test_single_bit_flip_breaks_syndrome():
    code = rs_code(4, GF8)
    cw = code.encode_bits(np.random.default_rng(1).integers(0, 2, code.k))
    assert is_codeword(code, cw) and is_codeword(code, np.zeros(code.n, dtype=np.uint8))
    for i in range(code.n):
        bad = cw.copy()
        bad[i] ^= 1
        assert not is_codeword(code, bad)
    with pytest.raises(ValueError):
        is_codeword(code, cw[:-1])


def test_extended_rs():
    base = rs_code(14, GF16)
    e = extend_rs(base)
    assert (e.N, e.K, e.is_extended) == (16, 14, True)
    with pytest.raises(ValueError):
        extend_rs(e)
    assert not np.any(rs_encode_systematic(e, [0] * 14))
    rng = np.random.default_rng(5)
    for _ in range(20):
        cw = rs_encode_systematic(e, rng.integers(0, 16, 14))
        total = 0
        for s in cw:
            total ^= int(s)
        assert total == 0
        bits = ((cw[:, None] >> np.arange(4)) & 1).reshape(-1)
        assert is_codeword(e, bits)


def test_random_linear_code():
    for seed in range(10):
        c = random_linear_code(16, 8, seed)
        assert not np.any(c.G_bin.astype(int) @ c.H_bin.T.astype(int) % 2)
    assert np.array_equal(random_linear_code(16, 8, 3).G_bin, random_linear_code(16, 8, 3).G_bin)
    c = random_linear_code(144, 130, 1)
    assert (c.n, c.k) == (144, 130)
    tiny = random_linear_code(2, 1, 0)
    assert {tuple(w) for w in tiny.codebook()} == {(0, 0), (1, int(tiny.G_bin[0, 1]))}
    with pytest.raises(ValueError):
        random_linear_code(4, 4)


def test_make_code_families():
    assert make_code("rs", 7, 4, 3).name == "RS(7,4)"
    assert make_code("ers", 16, 14, 4).is_extended
    assert make_code("hamming", 7, 4, 1).n == 7
    for bad in (("rs", 8, 4, 3), ("ers", 15, 14, 4), ("rlc", 8, 4, 2), ("hamming", 7, 3, 1), ("ldpc", 7, 4, 3)):
        with pytest.raises(ValueError):
            make_code(*bad)


def test_hamming_minimum_distance():
    book = hamming74().codebook()
    w = book.sum(axis=1)
    assert len(book) == 16 and w[w > 0].min() == 3


# --- product ---------------------------------------------------------------

def test_product_encode_examples():
    code = rs_code(5, GF8)
    assert not np.any(encode_cells(np.zeros((5, 5, 3), np.uint8), code))
    rng = np.random.default_rng(11)
    for _ in range(50):
        w = encode(rng.integers(0, 2, (5, 5, 3), dtype=np.uint8), code)
        assert w.is_valid()
    with pytest.raises(ValueError):
        encode_cells(np.zeros((4, 5, 3), np.uint8), code)


def test_product_systematic_and_rate():
    code = rs_code(4, GF8)
    u = np.random.default_rng(2).integers(0, 2, (4, 4, 3), dtype=np.uint8)
    assert np.array_equal(encode_cells(u, code)[:4, :4], u)
    assert product_rate(code) == pytest.approx(16 / 49)


def test_product_single_flip_invalid():
    code = rs_code(4, GF8)
    w = encode_cells(np.random.default_rng(3).integers(0, 2, (4, 4, 3), dtype=np.uint8), code)
    w[2, 5, 1] ^= 1
    assert not is_valid(w, code)
    assert invalid_lines(w, code) == ([2], [5])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_product_linearity(seed):
    code = rs_code(5, GF8)
    rng = np.random.default_rng(seed)
    u1, u2 = rng.integers(0, 2, (2, 5, 5, 3), dtype=np.uint8)
    assert np.array_equal(encode_cells(u1, code) ^ encode_cells(u2, code), encode_cells(u1 ^ u2, code))


def test_non_image_code_breaks_checks_on_checks():
    G = np.concatenate([np.eye(4, dtype=np.uint8), np.array([[0, 1], [1, 0], [0, 1], [1, 1]], np.uint8)], 1)
    toy = code_from_generator(G, b=2)
    u = np.array([[[0, 0], [1, 0]], [[0, 0], [0, 0]]], dtype=np.uint8)
    w = encode_cells(u, toy)
    # row 0 is (00 10 01); its column parities give the last row (00 01 10), not a codeword
    assert w[2].tolist() == [[0, 0], [0, 1], [1, 0]]
    rows, cols = invalid_lines(w, toy)
    assert rows == [2] and cols == []
    # a message that only touches the first cell's x^0 bit stays valid
    assert is_valid(encode_cells(np.array([[[1, 0], [0, 0]], [[0, 0], [0, 0]]], np.uint8), toy), toy)


def test_serialize_roundtrip():
    code = rs_code(3, GF8)
    rng = np.random.default_rng(4)
    for _ in range(10):
        w = encode(rng.integers(0, 2, (3, 3, 3), dtype=np.uint8), code)
        bits = serialize_cells(w)
        assert bits.size == 7 * 7 * 3
        assert deserialize_cells(bits, code) == w
        assert np.array_equal(bits[:3], w.cells[0, 0])
    assert not np.any(serialize_cells(ProductWord(np.zeros((7, 7, 3), np.uint8), code)))
    with pytest.raises(ValueError):
        deserialize_cells(np.zeros(10, np.uint8), code)
