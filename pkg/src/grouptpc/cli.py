"""Command-line entry point: BLER sweeps, information rates, thresholds and single-word debugging.

Usage::

    grouptpc bler --config run.cfg --out bler.csv --workers 4 ebn0=2:4:0.25
    grouptpc mi modulation=ask ell=2 rho=0.75 g=2 ebn0=0:10:1 --plot mi.png

Trailing ``key=value`` arguments override the config file. Exit codes are
0 on success, 2 on configuration errors and 3 on runtime errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__
from .channel import Constellation, snr_to_sigma
from .codes import make_code
from .config import ConfigError, ExperimentConfig
from .inforate import SCHEMES, RateEstimate, endogenous_samples, rate_gap, rate_samples, snr_threshold
from .product import encode_cells, is_valid
from .sim import BLER_COLUMNS, Simulator, run_bler
from .turbo import bits_to_cells

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

MI_COLUMNS = ["scheme", "eb_n0_db", "rate", "std_err"]
THRESHOLD_COLUMNS = ["modulation", "ell", "rho", "g", "rate", "t_gw", "t_bw", "t_bs",
                     "gain_bw_gw", "gain_bs_bw"]
ENDO_COLUMNS = ["n", "k", "g", "i_g", "i_b", "gap", "std_err", "samples"]
ENCODE_COLUMNS = ["row", "col", "value"]
DECODE_COLUMNS = ["half_iter", "axis", "valid", "cell_errors"]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(rows, columns, stream, comment: str):
    w = csv.writer(stream, lineterminator="\n")
    stream.write(f"# {comment}\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])


def run_mi(cfg: ExperimentConfig) -> list[dict]:
    c = Constellation(cfg.ell, cfg.modulation)
    rows = []
    for p, ebn0 in enumerate(cfg.ebn0):
        s2 = snr_to_sigma(ebn0, cfg.rate, cfg.ell)
        s = rate_samples(c, cfg.rho, s2, cfg.g, cfg.samples, [cfg.seed, p])
        for scheme in SCHEMES:
            est = RateEstimate.from_samples(s[scheme])
            rows.append(dict(scheme=scheme, eb_n0_db=ebn0, rate=est.value, std_err=est.std_error))
    return rows


def run_threshold(cfg: ExperimentConfig) -> list[dict]:
    c = Constellation(cfg.ell, cfg.modulation)
    t = {s: snr_threshold(s, c, cfg.rho, cfg.g, cfg.rate, cfg.seed, cfg.samples) for s in SCHEMES}
    return [dict(modulation=cfg.modulation, ell=cfg.ell, rho=cfg.rho, g=cfg.g, rate=cfg.rate,
                 t_gw=t["gw"], t_bw=t["bw"], t_bs=t["bs"],
                 gain_bw_gw=t["bw"] - t["gw"], gain_bs_bw=t["bs"] - t["bw"])]


def run_endo(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    n = cfg.endo_n
    for k in cfg.endo_k:
        code = (n, k) if cfg.resample_code else make_code("rlc", n, k, 1, cfg.code_seed)
        smp = endogenous_samples(code, cfg.ebn0[0], cfg.endo_g, cfg.samples, [cfg.seed, k])
        for g in cfg.endo_g:
            hg, hb = smp[g]
            ig = RateEstimate.from_samples(1.0 - hg / g)
            ib = RateEstimate.from_samples(1.0 - hb / g)
            gap = rate_gap({"g": 1.0 - hg / g, "b": 1.0 - hb / g}, "g", "b")
            rows.append(dict(n=n, k=k, g=g, i_g=ig.value, i_b=ib.value, gap=gap.value,
                             std_err=gap.std_error, samples=gap.samples))
    return rows


def run_encode(cfg: ExperimentConfig) -> list[dict]:
    code = make_code(cfg.family, cfg.N, cfg.K, cfg.b, cfg.code_seed)
    rng = np.random.default_rng(cfg.seed)
    u = rng.integers(0, 2, size=(cfg.K, cfg.K, cfg.b), dtype=np.uint8)
    cells = bits_to_cells(encode_cells(u, code))
    if not is_valid(encode_cells(u, code), code):
        raise RuntimeError("encoder produced an invalid product word")
    return [dict(row=i, col=j, value=int(cells[i, j]))
            for i in range(cfg.N) for j in range(cfg.N)]


def run_decode(cfg: ExperimentConfig, trial: int = 0) -> list[dict]:
    """Trace of one trial at the first Eb/N0 point: validity and cell errors per half-iteration."""
    sim = Simulator(cfg)
    sigma2 = sim.sigma2(cfg.ebn0[0])
    rng = np.random.default_rng([cfg.seed, 0, trial])
    sent = sim.transmit(rng)
    y = sim.receive(sent, sigma2, rng)
    trace = []
    sim.decode(sim.channel_logprobs(y, sigma2), trace)
    ref = bits_to_cells(sent)
    rows = []
    for h, t in enumerate(trace, 1):
        hd = t["hd"] if t["hd"].ndim == 2 else bits_to_cells(t["hd"])
        rows.append(dict(half_iter=h, axis="col" if t["axis"] == 0 else "row",
                         valid=int(t["valid"]), cell_errors=int(np.sum(hd != ref))))
    return rows


COMMANDS = {
    "bler": BLER_COLUMNS,
    "mi": MI_COLUMNS,
    "threshold": THRESHOLD_COLUMNS,
    "endo": ENDO_COLUMNS,
    "encode": ENCODE_COLUMNS,
    "decode": DECODE_COLUMNS,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grouptpc", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"grouptpc {__version__}")
    ap.add_argument("command", choices=list(COMMANDS))
    ap.add_argument("overrides", nargs="*", metavar="key=value", help="configuration overrides")
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--seed", type=int, help="master seed (overrides the config)")
    ap.add_argument("--out", help="CSV output path (default: stdout)")
    ap.add_argument("--workers", type=int, default=1, help="worker processes for bler")
    ap.add_argument("--trial", type=int, default=0, help="trial index for decode")
    ap.add_argument("--plot", help="also render a PNG figure to this path")
    return ap


def load_config(args) -> ExperimentConfig:
    text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
    over = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        k, v = item.split("=", 1)
        over[k.strip()] = v
    if args.seed is not None:
        over["seed"] = str(args.seed)
    return ExperimentConfig.from_text(text, over, args.command)


def _run(cmd: str, cfg: ExperimentConfig, args) -> list[dict]:
    if cmd == "bler":
        return run_bler(cfg, workers=max(args.workers, 1))
    if cmd == "mi":
        return run_mi(cfg)
    if cmd == "threshold":
        return run_threshold(cfg)
    if cmd == "endo":
        return run_endo(cfg)
    if cmd == "encode":
        return run_encode(cfg)
    return run_decode(cfg, args.trial)


def _plot(cmd: str, rows, path: str, cfg: ExperimentConfig):
    from . import plotting

    title = f"{cfg.family} ({cfg.N},{cfg.K}) b={cfg.b}" if cmd == "bler" else f"{cfg.modulation} ell={cfg.ell} rho={cfg.rho}"
    fn = {"bler": plotting.plot_bler, "mi": plotting.plot_rates,
          "threshold": plotting.plot_thresholds, "endo": plotting.plot_endo}.get(cmd)
    if fn is None:
        raise ConfigError("plot", f"no figure for the {cmd} command")
    fn(rows, path, title)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        cfg = load_config(args)
        if args.plot and args.command in ("encode", "decode"):
            raise ConfigError("plot", f"no figure for the {args.command} command")
    except ConfigError as exc:
        print(f"grouptpc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows = _run(args.command, cfg, args)
        buf = io.StringIO()
        write_csv(rows, COMMANDS[args.command], buf,
                  f"grouptpc {__version__} {args.command} {cfg.one_line()}")
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
        if args.plot:
            _plot(args.command, rows, args.plot, cfg)
    except ConfigError as exc:
        print(f"grouptpc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"grouptpc: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
