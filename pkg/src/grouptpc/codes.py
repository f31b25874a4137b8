"""Component codes: Reed-Solomon, singly extended RS, random linear and small binary codes.

Every code is carried as its binary image: a systematic binary generator
``G_bin`` of shape (bK, bN) and a full-rank parity-check matrix ``H_bin`` of
shape (bN - bK, bN). Cell ``i`` of a codeword occupies bits ``i*b .. i*b+b-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .gf import FieldSpec, gf_mul, make_field, mul_matrix, poly_mul

MAX_SYNDROME_BITS = 63


@dataclass(frozen=True, eq=False)
class ComponentCode:
    b: int
    N: int
    K: int
    G_bin: np.ndarray = dc_field(repr=False)
    H_bin: np.ndarray = dc_field(repr=False)
    field: FieldSpec | None = dc_field(default=None, repr=False)
    gen_poly: tuple | None = dc_field(default=None, repr=False)
    H_gf: np.ndarray | None = dc_field(default=None, repr=False)
    is_extended: bool = False
    name: str = ""

    @property
    def n(self) -> int:
        return self.b * self.N

    @property
    def k(self) -> int:
        return self.b * self.K

    @property
    def rate(self) -> float:
        return self.K / self.N

    @cached_property
    def syndrome_rows(self) -> int:
        return self.H_bin.shape[0]

    def syndrome_table(self, width: int | None = None) -> np.ndarray:
        """Syndrome contributions packed into int64 bitmasks.

        Entry ``[i, v]`` is the syndrome of the word that is zero except for the
        ``width``-bit value ``v`` (LSB first) at position ``i``. The syndrome of
        any word is the XOR of its positions' entries. ``width`` defaults to
        ``b`` (one position per cell); ``width=1`` gives per-bit positions.
        """
        width = self.b if width is None else width
        if self.n % width:
            raise ValueError(f"width {width} does not divide n={self.n}")
        r = self.syndrome_rows
        if r > MAX_SYNDROME_BITS:
            raise ValueError(f"{r} parity checks exceed the {MAX_SYNDROME_BITS}-bit syndrome word")
        weights = np.int64(1) << np.arange(r, dtype=np.int64)
        col_syn = (self.H_bin.astype(np.int64) * weights[:, None]).sum(axis=0)
        n_pos = self.n // width
        table = np.zeros((n_pos, 1 << width), dtype=np.int64)
        for v in range(1 << width):
            for s in range(width):
                if (v >> s) & 1:
                    table[:, v] ^= col_syn[s::width]
        return table

    def encode_bits(self, msg_bits) -> np.ndarray:
        msg_bits = np.asarray(msg_bits, dtype=np.uint8)
        if msg_bits.shape[-1] != self.k:
            raise ValueError(f"expected {self.k} message bits, got {msg_bits.shape[-1]}")
        return (msg_bits.astype(np.int64) @ self.G_bin % 2).astype(np.uint8)

    def codebook(self, max_k: int = 20) -> np.ndarray:
        """All 2^k codewords as rows; message index bit t drives generator row t."""
        if self.k > max_k:
            raise ValueError(f"codebook of 2^{self.k} words is too large to enumerate")
        idx = np.arange(1 << self.k, dtype=np.int64)
        msgs = ((idx[:, None] >> np.arange(self.k)) & 1).astype(np.uint8)
        return self.encode_bits(msgs)


def _gf2_rank(m: np.ndarray) -> int:
    a = np.array(m, dtype=np.uint8) % 2
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = np.nonzero(a[rank:, c])[0]
        if piv.size == 0:
            continue
        p = rank + piv[0]
        a[[rank, p]] = a[[p, rank]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != rank]
        a[others] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


gf2_rank = _gf2_rank


def _poly_mod(num: list[int], den: list[int], f: FieldSpec) -> list[int]:
    """Remainder of num / den, coefficients lowest degree first; den monic."""
    r = list(num)
    d = len(den) - 1
    for top in range(len(r) - 1, d - 1, -1):
        coef = r[top]
        if coef:
            for t in range(d + 1):
                r[top - d + t] ^= gf_mul(coef, den[t], f)
    return r[:d]


def rs_code(K: int, f: FieldSpec | int) -> ComponentCode:
    """Narrow-sense (2^b - 1, K) Reed-Solomon code, g(x) = prod_{i=1}^{N-K} (x - alpha^i).

    Codeword position ``j`` carries the coefficient of ``x^(N-1-j)``, so the
    message sits in the first K positions and ``H_gf[i-1, j] = alpha^(i(N-1-j))``.
    """
    if isinstance(f, int):
        f = make_field(f)
    N = f.order
    if not 1 <= K < N:
        raise ValueError(f"RS code needs 1 <= K < N={N}, got K={K}")
    g = [1]
    for i in range(1, N - K + 1):
        g = poly_mul(g, [f.alpha_pow(i), 1], f)
    H_gf = np.array(
        [[f.alpha_pow(i * (N - 1 - j)) for j in range(N)] for i in range(1, N - K + 1)],
        dtype=np.int64,
    )
    code = ComponentCode(
        b=f.b, N=N, K=K, G_bin=np.zeros((0, 0), np.uint8), H_bin=np.zeros((0, 0), np.uint8),
        field=f, gen_poly=tuple(g), H_gf=H_gf, name=f"RS({N},{K})",
    )
    return _with_binary_image(code)


def rs_encode_systematic(code: ComponentCode, msg) -> np.ndarray:
    """Systematic RS encoding over GF(2^b): returns N symbols, the first K equal ``msg``."""
    if code.gen_poly is None:
        raise ValueError(f"{code.name or 'code'} is not a Reed-Solomon code")
    f = code.field
    msg = [int(m) for m in msg]
    if len(msg) != code.K:
        raise ValueError(f"expected {code.K} message symbols, got {len(msg)}")
    if any(not 0 <= m < f.q for m in msg):
        raise ValueError("message symbol outside the field")
    n_rs = f.order
    # coefficient of x^(n_rs-1-j) is msg[j]
    shifted = [0] * n_rs
    for j, m in enumerate(msg):
        shifted[n_rs - 1 - j] = m
    parity = _poly_mod(shifted, list(code.gen_poly), f)
    word = msg + [parity[n_rs - 1 - j] for j in range(code.K, n_rs)]
    if code.is_extended:
        tail = 0
        for c in word:
            tail ^= c
        word.append(tail)
    return np.array(word, dtype=np.int64)


def extend_rs(code: ComponentCode) -> ComponentCode:
    """Singly extended (N+1, K) RS code; the extra symbol makes the symbol sum zero."""
    if code.gen_poly is None:
        raise ValueError("only Reed-Solomon codes can be extended")
    if code.is_extended:
        raise ValueError("code is already extended")
    r, N = code.H_gf.shape
    H = np.zeros((r + 1, N + 1), dtype=np.int64)
    H[:r, :N] = code.H_gf
    H[r, :] = 1
    ext = ComponentCode(
        b=code.b, N=N + 1, K=code.K, G_bin=np.zeros((0, 0), np.uint8),
        H_bin=np.zeros((0, 0), np.uint8), field=code.field, gen_poly=code.gen_poly,
        H_gf=H, is_extended=True, name=f"eRS({N + 1},{code.K})",
    )
    return _with_binary_image(ext)


def binary_image_H(code: ComponentCode) -> np.ndarray:
    """Binary parity-check matrix of the code's binary image."""
    if code.H_gf is None:
        return code.H_bin
    f = code.field
    r, N = code.H_gf.shape
    b = f.b
    H = np.zeros((r * b, N * b), dtype=np.uint8)
    for i in range(r):
        for j in range(N):
            H[i * b:(i + 1) * b, j * b:(j + 1) * b] = mul_matrix(int(code.H_gf[i, j]), f)
    return H


def _with_binary_image(code: ComponentCode) -> ComponentCode:
    b, K = code.b, code.K
    G = np.zeros((b * K, b * code.N), dtype=np.uint8)
    for i in range(K):
        for t in range(b):
            msg = [0] * K
            msg[i] = 1 << t
            word = rs_encode_systematic(code, msg)
            G[i * b + t] = ((word[:, None] >> np.arange(b)) & 1).reshape(-1)
    G.flags.writeable = False
    H = binary_image_H(code)
    H.flags.writeable = False
    object.__setattr__(code, "G_bin", G)
    object.__setattr__(code, "H_bin", H)
    return code


def code_from_generator(G, b: int = 1, name: str = "") -> ComponentCode:
    """Binary code from a systematic generator ``[I | P]``; ``H = [P^T | I]``.

    ``b`` only sets how bits are grouped into cells; the code is not assumed to
    be the binary image of anything.
    """
    G = np.asarray(G, dtype=np.uint8) % 2
    k, n = G.shape
    if k >= n:
        raise ValueError(f"need k < n, got ({n}, {k})")
    if not np.array_equal(G[:, :k], np.eye(k, dtype=np.uint8)):
        raise ValueError("generator must be systematic [I | P]")
    if n % b or k % b:
        raise ValueError(f"cell width {b} must divide n={n} and k={k}")
    P = G[:, k:]
    H = np.concatenate([P.T, np.eye(n - k, dtype=np.uint8)], axis=1)
    G.flags.writeable = False
    H.flags.writeable = False
    return ComponentCode(b=b, N=n // b, K=k // b, G_bin=G, H_bin=H, name=name or f"({n},{k})")


def random_linear_code(n: int, k: int, seed=None) -> ComponentCode:
    """Systematic binary code whose parity block is i.i.d. uniform."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got ({n}, {k})")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    P = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    G = np.concatenate([np.eye(k, dtype=np.uint8), P], axis=1)
    return code_from_generator(G, 1, name=f"RLC({n},{k})")


def hamming74() -> ComponentCode:
    G = [
        [1, 0, 0, 0, 1, 1, 0],
        [0, 1, 0, 0, 0, 1, 1],
        [0, 0, 1, 0, 1, 1, 1],
        [0, 0, 0, 1, 1, 0, 1],
    ]
    return code_from_generator(G, 1, name="Hamming(7,4)")


def is_codeword(code: ComponentCode, bits) -> bool:
    bits = np.asarray(bits)
    if bits.shape != (code.n,):
        raise ValueError(f"expected {code.n} bits, got shape {bits.shape}")
    return not np.any(code.H_bin.astype(np.int64) @ bits.astype(np.int64) % 2)


def make_code(family: str, N: int, K: int, b: int, seed: int = 0) -> ComponentCode:
    """Component code by family name: ``rs``, ``ers``, ``rlc``, ``hamming``."""
    if family == "rs":
        code = rs_code(K, make_field(b))
        if code.N != N:
            raise ValueError(f"RS over GF(2^{b}) has N={code.N}, not {N}")
        return code
    if family == "ers":
        if N != (1 << b):
            raise ValueError(f"extended RS over GF(2^{b}) has N={1 << b}, not {N}")
        return extend_rs(rs_code(K, make_field(b)))
    if family == "rlc":
        if b != 1:
            raise ValueError("random linear codes are binary (b=1)")
        return random_linear_code(N, K, seed)
    if family == "hamming":
        if (N, K, b) != (7, 4, 1):
            raise ValueError("only the (7,4) Hamming code with b=1 is provided")
        return hamming74()
    raise ValueError(f"unknown code family {family!r}")
