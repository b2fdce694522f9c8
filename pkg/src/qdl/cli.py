"""Command-line front end: one experiment per invocation.

Subcommands: constants, density, zeros, compare, ffield.  Standard
output carries only the result table (text, CSV, or JSON); progress and
diagnostics go to standard error.  Exit status is 0 exactly when every
requested computation met its internal tolerance certificate.

Configuration comes from flags, optionally seeded by a JSON file via
--config; explicit flags win over file entries.  CSV output is RFC 4180
style with a mandatory header and 12-significant-digit decimals; JSON
output is one object {"meta": ..., "rows": [...]}.  When CSV goes to a
file, a ready-to-run plot script template lands next to it; nothing is
ever rendered in-process.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from .explicit import F_STAR, build_family, density, scale_length
from .ffield import ff_one_level_density, rudnick_rhs, validate_family
from .predict import (R_w1, T1_1, T3_5, THEOREMS, c_w1, c_w1_tail_bound,
                      d1_proof_grouping, default_constants, default_tables,
                      error_exponents, theorem_rhs, v_w1)
from .testfn import TestFunction, fejer, fejer_squared
from .weightfn import gaussian_weight, get_mobius_kernels
from .zeros import find_zeros_cached
from . import __version__

_KERNELS = {"fejer": fejer, "fejer_squared": fejer_squared}
_WEIGHTS = {"gaussian": gaussian_weight}


@dataclass
class RunConfig:
    command: str
    X_ladder: List[float] = field(default_factory=lambda: [1e3, 1e4, 1e5])
    kernel: str = "fejer_squared"
    sigma: float = 0.9
    weight: str = "gaussian"
    K: int = 1
    T_height: float = 60.0
    s_cutoff: Optional[int] = None
    prime_cutoff: int = 20
    q: int = 3
    n_list: List[int] = field(default_factory=lambda: [5, 7, 9])
    d_range: Tuple[int, int] = (-20, 20)
    cache_dir: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "table"
    threads: int = 1
    theorem: str = T1_1

    def test_function(self) -> TestFunction:
        if self.kernel not in _KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        return _KERNELS[self.kernel](self.sigma)

    def weight_function(self):
        if self.weight not in _WEIGHTS:
            raise ValueError(f"unknown weight {self.weight!r}")
        return _WEIGHTS[self.weight]()

    def validate(self) -> None:
        if self.sigma <= 0 or self.sigma >= 2:
            raise ValueError("sigma must lie in (0, 2)")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if any(X < 10 for X in self.X_ladder):
            raise ValueError("X must be at least 10")
        if self.T_height <= 0:
            raise ValueError("T must be positive")
        if self.format not in ("table", "csv", "json"):
            raise ValueError("format must be table, csv or json")
        if self.theorem not in THEOREMS:
            raise ValueError(f"theorem must be one of {sorted(THEOREMS)}")
        if self.threads < 1:
            raise ValueError("threads must be positive")


# ------------------------------------------------------------- plumbing

def _sig(x) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Auto-generated companion for {csv_name}: edit the column picks below.
import csv

import matplotlib.pyplot as plt

with open({csv_name!r}) as fh:
    rows = list(csv.DictReader(fh))
cols = rows[0].keys() if rows else []
print("columns:", ", ".join(cols))
xs = [float(r["{xcol}"]) for r in rows]
ys = [float(r["{ycol}"]) for r in rows if r["{ycol}"]]
plt.plot(xs[: len(ys)], ys, "o-")
plt.xscale("log")
plt.xlabel("{xcol}")
plt.ylabel("{ycol}")
plt.tight_layout()
plt.savefig({png_name!r}, dpi=150)
print("wrote {png_name}")
"""


def _emit(headers: Sequence[str], rows: Sequence[Sequence],
          cfg: RunConfig, meta: Dict) -> None:
    out = sys.stdout
    close = False
    if cfg.output_path:
        out = open(cfg.output_path, "w", newline="")
        close = True
    try:
        if cfg.format == "csv":
            writer = csv.writer(out, lineterminator="\r\n")
            writer.writerow(headers)
            for row in rows:
                writer.writerow([_sig(v) for v in row])
        elif cfg.format == "json":
            payload = {"meta": meta,
                       "rows": [dict(zip(headers, row)) for row in rows]}
            json.dump(payload, out, indent=1, default=_sig)
            out.write("\n")
        else:
            widths = [max(len(h), max((len(_sig(r[i])) for r in rows),
                                      default=0))
                      for i, h in enumerate(headers)]
            out.write("  ".join(h.ljust(w)
                                for h, w in zip(headers, widths)).rstrip()
                      + "\n")
            for row in rows:
                out.write("  ".join(_sig(v).ljust(w)
                                    for v, w in zip(row, widths)).rstrip()
                          + "\n")
    finally:
        if close:
            out.close()
    if cfg.format == "csv" and cfg.output_path and len(headers) >= 2:
        path = Path(cfg.output_path)
        script = path.with_name(path.stem + "_plot.py")
        script.write_text(_PLOT_TEMPLATE.format(
            csv_name=path.name, xcol=headers[0], ycol=headers[1],
            png_name=path.stem + ".png"))


def _meta(cfg: RunConfig, tolerances: Dict) -> Dict:
    echo = asdict(cfg)
    echo["d_range"] = list(echo["d_range"])
    return {
        "config": echo,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "qdl": __version__,
        },
        "tolerances": tolerances,
    }


# ------------------------------------------------------------- commands

def cmd_constants(cfg: RunConfig) -> Tuple[List[str], List[list], Dict, bool]:
    tables = default_tables()
    consts = default_constants(tables)
    w = cfg.weight_function()
    kern = get_mobius_kernels(w)
    cw1 = c_w1(kern)
    rows = [
        ["euler_gamma", consts.euler_gamma, 0.0],
        ["zeta_2", consts.zeta_2, 0.0],
        ["zeta_half", consts.zeta_half, 0.0],
        ["zeta_prime_over_zeta_at_2", consts.zeta_prime_over_zeta_at_2, 0.0],
        ["prime_constant", consts.prime_constant_value,
         consts.prime_constant_tail],
        ["theta_integral", consts.theta_integral_value,
         consts.theta_integral_uncertainty],
        ["c_w1", cw1, c_w1_tail_bound(kern)],
        ["v_w1", v_w1(w), 1e-8],
        ["d1_proof_grouping", d1_proof_grouping(consts, tables),
         2.0 * consts.prime_constant_tail],
    ]
    meta = _meta(cfg, {"sieve_limit": tables.limit})
    return ["constant", "value", "uncertainty"], rows, meta, True


def cmd_density(cfg: RunConfig) -> Tuple[List[str], List[list], Dict, bool]:
    phi = cfg.test_function()
    w = cfg.weight_function()
    tables = default_tables()
    eta, _ = error_exponents(phi.sigma)
    kern = get_mobius_kernels(w)
    consts = default_constants(tables)
    r1 = R_w1(phi, w, kern, consts)
    rows = []
    ok = True
    for X in cfg.X_ladder:
        _progress(f"density: X = {X:g}")
        try:
            spec = build_family(F_STAR, X, w, tables)
            meas = density(spec, phi, weight=w, threads=cfg.threads,
                           convention="display")
            rhs = theorem_rhs(T3_5, phi, w, X, kernels=kern, consts=consts,
                              tables=tables)
            resid = meas.total - rhs.main_term
            rows.append([X, meas.L_value, meas.total, rhs.total,
                         rhs.main_term, resid, resid * meas.L_value, r1,
                         X ** eta])
        except Exception as exc:  # flush partial results with a marker
            rows.append([X, "", "", "", "", "", "", "", f"FAILED: {exc}"])
            ok = False
    headers = ["X", "L", "family_density", "exact_rhs", "main_term",
               "residual", "residual_x_L", "R_w1", "X_pow_eta"]
    return headers, rows, _meta(cfg, {"eta": eta}), ok


def cmd_zeros(cfg: RunConfig) -> Tuple[List[str], List[list], Dict, bool]:
    from .explicit import _is_squarefree
    lo, hi = cfg.d_range
    rows = []
    ok = True
    for d in range(lo, hi + 1):
        # non-squarefree d share every zero with their squarefree kernel;
        # they are not separate rows of the family
        if d == 0 or not _is_squarefree(abs(d)):
            continue
        try:
            zs = find_zeros_cached(d, cfg.T_height, cache_dir=cfg.cache_dir)
        except Exception as exc:
            rows.append([d, "", "", "", "", f"FAILED: {exc}"])
            ok = False
            continue
        first = zs.gammas[0] if zs.gammas.size else math.nan
        rows.append([d, zs.conductor, zs.height_T, zs.complete,
                     int(zs.gammas.size), first])
        ok = ok and zs.complete
    headers = ["d", "conductor", "T", "complete", "zero_count",
               "lowest_gamma"]
    return headers, rows, _meta(cfg, {"height": cfg.T_height}), ok


def cmd_compare(cfg: RunConfig) -> Tuple[List[str], List[list], Dict, bool]:
    phi = cfg.test_function()
    w = cfg.weight_function()
    tables = default_tables()
    consts = default_constants(tables)
    kern = get_mobius_kernels(w)
    star = cfg.theorem in (T1_1, T3_5)
    r1 = R_w1(phi, w, kern, consts) if star else ""
    rows = []
    ok = True
    for X in cfg.X_ladder:
        _progress(f"compare {cfg.theorem}: X = {X:g}")
        try:
            rep = theorem_rhs(cfg.theorem, phi, w, X, K=cfg.K, kernels=kern,
                              consts=consts, tables=tables)
            L = scale_length(X)
            if star:
                exact = theorem_rhs(T3_5, phi, w, X, kernels=kern,
                                    consts=consts, tables=tables).total
                resid_L = (exact - rep.main_term) * L
            else:
                exact = ""
                resid_L = (rep.total - rep.main_term) * L
            eta, _ = error_exponents(phi.sigma)
            rows.append([X, L, rep.branch, rep.main_term, rep.total, exact,
                         resid_L, r1, X ** eta])
        except Exception as exc:
            rows.append([X, "", "", "", "", "", "", "", f"FAILED: {exc}"])
            ok = False
    headers = ["X", "L", "branch", "main_term", "rhs_total", "exact_total",
               "residual_x_L", "R_w1", "X_pow_eta"]
    return headers, rows, _meta(cfg, {"K": cfg.K}), ok


def cmd_ffield(cfg: RunConfig) -> Tuple[List[str], List[list], Dict, bool]:
    phi = cfg.test_function()
    rows = []
    ok = True
    for n in cfg.n_list:
        _progress(f"ffield: q = {cfg.q}, n = {n}")
        try:
            g = (n - 1) // 2
            val = ff_one_level_density(cfg.q, n, phi)
            pred = rudnick_rhs(cfg.q, g, phi,
                               prime_poly_cutoff=cfg.prime_cutoff)
            cert = validate_family(cfg.q, n, sample=40)
            err_main = abs(val - pred.main_term)
            err_corr = abs(val - pred.total)
            rows.append([n, g, int(cert["curves"]), val, pred.main_term,
                         pred.total, err_main, err_corr,
                         cert["functional_equation_defect"],
                         cert["weil_defect"]])
            ok = ok and cert["functional_equation_defect"] == 0.0 \
                and cert["weil_defect"] < 1e-8 and err_corr < err_main
        except Exception as exc:
            rows.append([n, "", "", "", "", "", "", "", "", f"FAILED: {exc}"])
            ok = False
    headers = ["n", "g", "curves", "density", "main_term", "corrected",
               "err_main", "err_corrected", "fe_defect", "weil_defect"]
    return headers, rows, _meta(cfg, {"weil": 1e-8}), ok


_COMMANDS = {
    "constants": cmd_constants,
    "density": cmd_density,
    "zeros": cmd_zeros,
    "compare": cmd_compare,
    "ffield": cmd_ffield,
}


# ------------------------------------------------------------ arg layer

def _parse_x(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _parse_d_range(text: str) -> Tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    v = int(text)
    return -abs(v), abs(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qdl",
        description="quadratic Dirichlet L-function density experiments")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--X", type=str, default=None,
                       help="comma-separated X ladder, e.g. 1e3,1e4,1e5")
        s.add_argument("--sigma", type=float, default=None)
        s.add_argument("--kernel", choices=sorted(_KERNELS), default=None)
        s.add_argument("--K", type=int, default=None)
        s.add_argument("--T", type=float, default=None,
                       help="zero-search height")
        s.add_argument("--q", type=int, default=None)
        s.add_argument("--n", type=str, default=None,
                       help="comma-separated degrees (ffield) "
                            "or d range lo..hi (zeros)")
        s.add_argument("--cache-dir", type=str, default=None)
        s.add_argument("--out", type=str, default=None)
        s.add_argument("--format", choices=("table", "csv", "json"),
                       default=None)
        s.add_argument("--threads", type=int, default=None)
        s.add_argument("--config", type=str, default=None,
                       help="JSON file with flag defaults")
        if name == "compare":
            s.add_argument("theorem", nargs="?", default=None,
                           choices=sorted(THEOREMS))
    return p


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_cfg: Dict = {}
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
    cfg = RunConfig(command=args.command)

    def pick(flag_value, key, fallback):
        if flag_value is not None:
            return flag_value
        return file_cfg.get(key, fallback)

    if pick(args.X, "X", None) is not None:
        raw = pick(args.X, "X", None)
        cfg.X_ladder = _parse_x(raw) if isinstance(raw, str) else \
            [float(v) for v in raw]
    cfg.sigma = float(pick(args.sigma, "sigma", cfg.sigma))
    cfg.kernel = pick(args.kernel, "kernel", cfg.kernel)
    cfg.K = int(pick(args.K, "K", cfg.K))
    cfg.T_height = float(pick(args.T, "T", cfg.T_height))
    cfg.q = int(pick(args.q, "q", cfg.q))
    n_raw = pick(args.n, "n", None)
    if n_raw is not None:
        if args.command == "zeros":
            cfg.d_range = _parse_d_range(str(n_raw))
        else:
            cfg.n_list = [int(v) for v in str(n_raw).split(",") if v]
    cfg.cache_dir = pick(args.cache_dir, "cache_dir", None)
    cfg.output_path = pick(args.out, "out", None)
    cfg.format = pick(args.format, "format", cfg.format)
    cfg.threads = int(pick(args.threads, "threads", cfg.threads))
    if args.command == "compare":
        cfg.theorem = pick(getattr(args, "theorem", None), "theorem", T1_1)
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        cfg.validate()
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"qdl: {exc}", file=sys.stderr)
        return 2
    headers, rows, meta, ok = _COMMANDS[args.command](cfg)
    _emit(headers, rows, cfg, meta)
    return 0 if ok else 1


def main_entry() -> None:  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
