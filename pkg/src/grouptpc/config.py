"""Experiment configuration: a flat ``key = value`` text format with strict validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

import numpy as np


class ConfigError(ValueError):
    """Invalid or unknown configuration entry; carries the offending field name."""

    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


CODED_COMMANDS = ("bler", "encode", "decode")


def _floats(text: str) -> list[float]:
    """``2,2.5,3`` or ``start:stop:step`` (stop inclusive)."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return [float(t) for t in text.split(",")]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _fmt(v) -> str:
    if isinstance(v, list):
        return ",".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class ExperimentConfig:
    # component code
    family: str = "rs"
    N: int = 7
    K: int = 4
    b: int = 3
    code_seed: int = 0
    # modulation and channel
    modulation: str = "ask"
    ell: int = 1
    rho: float = 0.0
    channel: str = "gm"
    scheme: str = "gw"
    # decoder
    mode: str = "group"
    alpha: float = 0.5
    i_max: int = 8
    n_list: int = 4
    threshold: float = 1e-4
    n_b: int = 0
    max_queries: int = 100_000
    pattern: str = "exact"
    # sweep and stopping
    ebn0: list = field(default_factory=lambda: [3.0])
    min_errors: int = 100
    max_trials: int = 1_000_000
    stop_bler: float = 0.0
    seed: int = 1
    # information-rate experiments
    g: int = 2
    rate: float = 0.9
    samples: int = 100_000
    endo_n: int = 16
    endo_k: list = field(default_factory=lambda: [8, 11, 14])
    endo_g: list = field(default_factory=lambda: [2, 3, 4])
    resample_code: bool = True

    _list_float = ("ebn0",)
    _list_int = ("endo_k", "endo_g")

    @property
    def cells_symbols(self) -> int:
        """Modulation symbols per product-code cell."""
        return self.b // self.ell

    @property
    def effective_n_b(self) -> int:
        return self.n_b if self.n_b > 0 else 1 << self.b

    def validate(self, command: str = "bler") -> "ExperimentConfig":
        """Check every field; the cell/modulation fit only matters for coded runs."""

        def need(cond, key, msg):
            if not cond:
                raise ConfigError(key, msg)

        need(self.family in ("rs", "ers", "rlc", "hamming"), "family", f"unknown code family {self.family!r}")
        need(1 <= self.b <= 8, "b", "must lie in 1..8")
        need(1 <= self.K < self.N, "K", "need 1 <= K < N")
        need(self.family != "rs" or self.N == (1 << self.b) - 1, "N", "RS codes need N = 2^b - 1")
        need(self.family != "ers" or self.N == 1 << self.b, "N", "extended RS codes need N = 2^b")
        need(self.family != "rlc" or self.b == 1, "b", "random linear codes are binary (b = 1)")
        need(self.family != "hamming" or (self.N, self.K, self.b) == (7, 4, 1), "family",
             "only the (7,4) Hamming code with b = 1 is provided")
        need(self.modulation in ("ask", "qam"), "modulation", "must be ask or qam")
        need(self.ell >= 1, "ell", "must be >= 1")
        need(self.modulation != "qam" or self.ell % 2 == 0, "ell", "qam needs an even number of bits")
        if command in CODED_COMMANDS:
            need(self.b % self.ell == 0, "ell", f"must divide the cell width b={self.b}")
        need(-1 < self.rho < 1, "rho", "must satisfy |rho| < 1")
        need(self.channel in ("gm", "isi"), "channel", "must be gm or isi")
        need(self.scheme in ("gw", "bw", "bs"), "scheme", "must be gw, bw or bs")
        need(self.mode in ("group", "bit"), "mode", "must be group or bit")
        need(0.0 <= self.alpha <= 1.0, "alpha", "must lie in [0, 1]")
        need(self.i_max >= 1, "i_max", "must be >= 1")
        need(self.n_list >= 1, "n_list", "must be >= 1")
        need(0.0 <= self.threshold <= 1.0, "threshold", "must lie in [0, 1]")
        need(self.n_b >= 0, "n_b", "must be >= 0 (0 keeps all 2^b groups)")
        need(self.max_queries >= 1, "max_queries", "must be >= 1")
        need(self.pattern in ("exact", "oneline"), "pattern", "must be exact or oneline")
        need(len(self.ebn0) >= 1, "ebn0", "needs at least one point")
        need(self.min_errors >= 1, "min_errors", "must be >= 1")
        need(self.max_trials >= 1, "max_trials", "must be >= 1")
        need(0.0 <= self.stop_bler < 1.0, "stop_bler", "must lie in [0, 1) (0 runs every point)")
        need(self.seed >= 0, "seed", "must be >= 0")
        need(self.g >= 1, "g", "must be >= 1")
        need(0 < self.rate < 1, "rate", "must lie in (0, 1)")
        need(self.samples >= 1000, "samples", "must be >= 1000")
        need(all(1 <= k < self.endo_n for k in self.endo_k), "endo_k", "need 1 <= k < endo_n")
        need(all(1 <= g <= self.endo_n for g in self.endo_g), "endo_g", "need 1 <= g <= endo_n")
        return self

    def set(self, key: str, value: str) -> None:
        names = {f.name: f for f in fields(self)}
        if key not in names or key.startswith("_"):
            raise ConfigError(key, "unknown configuration key")
        cur = getattr(self, key)
        try:
            if key in self._list_float:
                val = _floats(value)
            elif key in self._list_int:
                val = _ints(value)
            elif isinstance(cur, bool):
                low = value.strip().lower()
                if low not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"not a boolean: {value!r}")
                val = low in ("true", "1", "yes")
            elif isinstance(cur, int):
                val = int(float(value)) if "e" in value.lower() else int(value)
            elif isinstance(cur, float):
                val = float(value)
            else:
                val = value.strip()
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
        setattr(self, key, val)

    @classmethod
    def from_text(cls, text: str, overrides: dict | None = None,
                  command: str = "bler") -> "ExperimentConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
            key, value = (t.strip() for t in line.split("=", 1))
            cfg.set(key, value)
        for key, value in (overrides or {}).items():
            cfg.set(key, str(value))
        return cfg.validate(command)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {_fmt(getattr(self, f.name))}\n" for f in fields(self))

    def one_line(self) -> str:
        return " ".join(f"{f.name}={_fmt(getattr(self, f.name))}" for f in fields(self))

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw).validate()
