"""Square product codes over N x N grids of b-bit cells."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import ComponentCode


@dataclass(eq=False)
class ProductWord:
    """A (possibly invalid) product-code word; ``cells`` has shape (N, N, b)."""

    cells: np.ndarray
    code: ComponentCode

    def row_bits(self, i: int) -> np.ndarray:
        return self.cells[i].reshape(-1)

    def col_bits(self, j: int) -> np.ndarray:
        return self.cells[:, j].reshape(-1)

    def is_valid(self) -> bool:
        return is_valid(self)

    def __eq__(self, other):
        return isinstance(other, ProductWord) and np.array_equal(self.cells, other.cells)


def encode_cells(u, code: ComponentCode) -> np.ndarray:
    """Rows 0..K-1 first, then all N columns; returns the (N, N, b) bit array."""
    u = np.asarray(u, dtype=np.uint8)
    K, N, b = code.K, code.N, code.b
    if u.shape != (K, K, b):
        raise ValueError(f"expected message shape {(K, K, b)}, got {u.shape}")
    G = code.G_bin.astype(np.int64)
    rows = (u.reshape(K, K * b).astype(np.int64) @ G % 2).reshape(K, N, b)
    cols = rows.transpose(1, 0, 2).reshape(N, K * b)
    full = (cols @ G % 2).reshape(N, N, b).transpose(1, 0, 2)
    return np.ascontiguousarray(full, dtype=np.uint8)


def encode(u, code: ComponentCode) -> ProductWord:
    return ProductWord(encode_cells(u, code), code)


def _cells_of(w) -> tuple[np.ndarray, ComponentCode | None]:
    if isinstance(w, ProductWord):
        return w.cells, w.code
    return np.asarray(w), None


def is_valid(w, code: ComponentCode | None = None) -> bool:
    """True iff every row and every column concatenation is a component codeword."""
    cells, wcode = _cells_of(w)
    code = code or wcode
    N, b = code.N, code.b
    if cells.shape != (N, N, b):
        raise ValueError(f"expected cell shape {(N, N, b)}, got {cells.shape}")
    H = code.H_bin.astype(np.int64)
    rows = cells.reshape(N, N * b).astype(np.int64)
    cols = cells.transpose(1, 0, 2).reshape(N, N * b).astype(np.int64)
    return not (np.any(rows @ H.T % 2) or np.any(cols @ H.T % 2))


def invalid_lines(w, code: ComponentCode | None = None) -> tuple[list[int], list[int]]:
    """Indices of rows and columns that fail the component parity checks."""
    cells, wcode = _cells_of(w)
    code = code or wcode
    N, b = code.N, code.b
    H = code.H_bin.astype(np.int64)
    rows = cells.reshape(N, N * b).astype(np.int64) @ H.T % 2
    cols = cells.transpose(1, 0, 2).reshape(N, N * b).astype(np.int64) @ H.T % 2
    return list(np.nonzero(rows.any(axis=1))[0]), list(np.nonzero(cols.any(axis=1))[0])


def serialize_cells(w) -> np.ndarray:
    """Row-major cells, bits within a cell in basis order."""
    cells, _ = _cells_of(w)
    return cells.reshape(-1).copy()


def deserialize_cells(bits, code: ComponentCode) -> ProductWord:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size != code.N * code.N * code.b:
        raise ValueError(f"expected {code.N * code.N * code.b} bits, got {bits.size}")
    return ProductWord(bits.reshape(code.N, code.N, code.b).copy(), code)


def product_rate(code: ComponentCode) -> float:
    return (code.K / code.N) ** 2
