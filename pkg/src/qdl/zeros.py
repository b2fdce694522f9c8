"""Nontrivial zeros of L(s, chi_d) for real primitive quadratic characters.

Evaluation goes through the Hurwitz decomposition
L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q), each Hurwitz value by
Euler-Maclaurin with Bernoulli corrections through B_30.  That is O(q) per
point, which at conductor <= 1e4 and height <= 200 beats the bookkeeping of
an approximate functional equation while keeping transparent error control.

Zeros are located as sign changes of the Hardy function
Z(t) = e^{i theta(t)} L(1/2 + it, chi), theta(t) = Im log Gamma((1/2+it+a)/2)
- (t/2) log(pi/q), which is real exactly because the root number of a real
primitive quadratic character is +1.  The code never assumes that: the
imaginary part is monitored and signalled if it exceeds 1e-7.  Completeness
is certified by the argument principle: N(T) = theta(T)/pi + (1/pi) arg
L(1/2+iT), the argument carried continuously along 2 -> 2+iT -> 1/2+iT
(plus 1 for d = 1, whose completed zeta has the extra s(s-1) factor).
"""

from __future__ import annotations

import math
import cmath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import fsum
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import loggamma

from .arith import kronecker
from .explicit import (F_ALL, F_STAR, FamilySpec, conductor, scale_length,
                       _is_squarefree)
from .testfn import TestFunction

CONDUCTOR_BOUND = 10_000
HEIGHT_BOUND = 200.0

# B_2 .. B_30
_BERNOULLI = (
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330, 854513.0 / 138,
    -236364091.0 / 2730, 8553103.0 / 6, -23749461029.0 / 870,
    8615841276005.0 / 14322,
)
_BFAC = tuple(b / math.factorial(2 * k + 2) for k, b in enumerate(_BERNOULLI))


class PrecisionLossError(ArithmeticError):
    """Catastrophic cancellation beyond the promised accuracy."""


# ------------------------------------------------------------ hurwitz zeta

def _em_tail(s: complex, x: np.ndarray) -> np.ndarray:
    """Euler-Maclaurin remainder of zeta(s, a) after the first terms:
    x^{1-s}/(s-1) + x^{-s}/2 + sum_k B_{2k}/(2k)! (s)_{2k-1} x^{-s-2k+1}."""
    logx = np.log(x)
    xs = np.exp(-s * logx)
    out = xs * x / (s - 1.0) + 0.5 * xs
    rising = s
    xpow = xs * x                      # x^{-s+1}
    inv2 = 1.0 / (x * x)
    for k, bf in enumerate(_BFAC, start=1):
        xpow = xpow * inv2             # x^{-s-2k+1}
        out = out + bf * rising * xpow
        rising = rising * (s + (2 * k - 1)) * (s + 2 * k)
    return out


def _em_tail_at_one(x: np.ndarray) -> np.ndarray:
    """Limit of _em_tail as s -> 1 with the pole removed: the 1/(s-1)
    parts cancel in any character sum with sum chi(a) = 0, leaving
    -log x + 1/(2x) + sum_k B_{2k}/(2k) x^{-2k}."""
    out = -np.log(x) + 0.5 / x
    inv2 = 1.0 / (x * x)
    xpow = np.ones_like(x)
    for k, bf in enumerate(_BFAC, start=1):
        xpow = xpow * inv2
        out = out + bf * math.factorial(2 * k - 1) * xpow
    return out


def _em_tail_next_term(s: complex, x: float) -> float:
    # magnitude of the first omitted correction (k = 16, B_32/32!)
    b32_fac = 7709321041217.0 / 510 / math.factorial(32)
    rising = abs(s)
    for j in range(1, 31):
        rising *= abs(s + j)
    return b32_fac * rising * x ** (-(s.real + 31.0))


def hurwitz_zeta(s: complex, a: float) -> complex:
    """zeta(s, a) = sum_{n>=0} (n+a)^{-s} by Euler-Maclaurin, for
    Re(s) > -3, a in (0, 1].  The cut N is grown until the first omitted
    Bernoulli correction is below 1e-14 of the result."""
    if not 0.0 < a <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise ValueError("zeta(s, a) has a pole at s = 1")
    if s.real <= -3.0:
        raise ValueError("Re(s) must exceed -3")
    N = max(12, int(0.7 * abs(s.imag)) + 8)
    while True:
        n = np.arange(N, dtype=float) + a
        terms = np.exp(-s * np.log(n))
        head = complex(np.sum(terms))
        gross = float(np.sum(np.abs(terms)))
        val = head + complex(_em_tail(s, np.array([N + a]))[0])
        if _em_tail_next_term(s, N + a) < 1e-14 * max(abs(val), 1e-300):
            break
        if N > 1 << 20:
            raise PrecisionLossError("Euler-Maclaurin failed to converge")
        N *= 2
    if abs(val) > 0 and gross > 1e6 * abs(val):
        raise PrecisionLossError(
            f"cancellation ratio {gross / abs(val):.1e} in zeta(s, a)")
    return val


# ------------------------------------------------------------- L functions

def fundamental_discriminant(d: int) -> int:
    """The discriminant of Q(sqrt d) for squarefree d: d itself when
    d = 1 mod 4, else 4d."""
    if not _is_squarefree(d) or d == 0:
        raise ValueError(f"d = {d} is not a nonzero squarefree integer")
    return d if d % 4 == 1 else 4 * d


class LFunction:
    """L(s, chi_d) for the primitive real character attached to d,
    with fast evaluation along the critical line."""

    def __init__(self, d: int, height: float = HEIGHT_BOUND):
        self.d = int(d)
        self.q = conductor(d)
        if self.q > CONDUCTOR_BOUND:
            raise ValueError(f"conductor {self.q} exceeds {CONDUCTOR_BOUND}")
        self.parity = 0 if d > 0 else 1
        disc = fundamental_discriminant(d)
        self.chi = np.array([kronecker(disc, m) for m in range(self.q)],
                            dtype=np.int8)
        # Euler-Maclaurin cut: big enough for |Im s| <= height
        self.N = max(16, int(0.8 * height) + 10)
        m = np.arange(1, self.N * self.q + 1, dtype=np.int64)
        cm = self.chi[m % self.q]
        keep = cm != 0
        self._m_chi = cm[keep].astype(np.float64)
        self._m_log = np.log(m[keep].astype(np.float64))
        self._m_half = self._m_chi * np.exp(-0.5 * self._m_log)
        a = np.arange(1, self.q + 1, dtype=np.float64) / self.q
        self._a_chi = self.chi[np.arange(1, self.q + 1) % self.q].astype(np.float64)
        self._x = self.N + a
        self._logx = np.log(self._x)

    def value(self, s: complex) -> complex:
        """L(s, chi) for any s with Re(s) > -3 (away from s = 1 if d = 1)."""
        s = complex(s)
        if abs(s - 1.0) < 1e-8:
            if self.d == 1:
                raise ValueError("zeta has a pole at s = 1")
            # the per-a Hurwitz poles cancel since sum chi(a) = 0
            head = complex(np.dot(self._m_chi, np.exp(-self._m_log)))
            tail = complex(np.dot(self._a_chi, _em_tail_at_one(self._x)))
            return head + tail / self.q
        head = complex(np.dot(self._m_chi, np.exp(-s * self._m_log)))
        tail = complex(np.dot(self._a_chi, _em_tail(s, self._x)))
        return head + self.q ** (-s) * tail

    def _values_half(self, ts: np.ndarray) -> np.ndarray:
        out = np.empty(ts.size, dtype=complex)
        for i, t in enumerate(ts):
            ph = t * self._m_log
            head = complex(np.dot(self._m_half, np.cos(ph))
                           - 1j * np.dot(self._m_half, np.sin(ph)))
            s = 0.5 + 1j * t
            tail = complex(np.dot(self._a_chi, _em_tail(s, self._x)))
            out[i] = head + self.q ** (-s) * tail
        return out

    def theta(self, t):
        """Phase making e^{i theta} L(1/2+it) real; theta(0) = 0."""
        z = (0.5 + self.parity + 1j * np.asarray(t, dtype=float)) / 2.0
        return np.imag(loggamma(z)) - np.asarray(t, dtype=float) / 2.0 * math.log(
            math.pi / self.q)

    def z_values(self, ts: np.ndarray) -> tuple:
        """(Z(t) array, max |Im| seen); Im Z must vanish for real chi."""
        vals = self._values_half(np.asarray(ts, dtype=float))
        rot = np.exp(1j * self.theta(ts))
        zv = rot * vals
        return zv.real, float(np.max(np.abs(zv.imag))) if zv.size else 0.0

    def z(self, t: float) -> float:
        zr, im = self.z_values(np.array([float(t)]))
        if im > 1e-7:
            raise PrecisionLossError(
                f"Z(t) acquired imaginary part {im:.2e} at d={self.d}, t={t}")
        return float(zr[0])

    # ------------------------------------------------- argument principle

    def _arg_continuation(self, T: float) -> float:
        """Continuous arg L along 2 -> 2+iT -> 1/2+iT, anchored at
        arg L(2) = 0 (the Euler product is positive there)."""
        path = [complex(2.0, 0.0)]
        n_up = max(2, int(math.ceil(T / 0.5)))
        path += [complex(2.0, T * k / n_up) for k in range(1, n_up + 1)]
        n_left = 16
        path += [complex(2.0 - 1.5 * k / n_left, T) for k in range(1, n_left + 1)]

        total = 0.0
        prev_s = path[0]
        prev_v = self.value(prev_s)
        for s1 in path[1:]:
            inc, prev_v = self._arg_segment(prev_s, prev_v, s1, depth=0)
            total += inc
            prev_s = s1
        return total

    def _arg_segment(self, s0: complex, v0: complex, s1: complex,
                     depth: int) -> tuple:
        v1 = self.value(s1)
        if abs(v1) == 0.0 or abs(v0) == 0.0:
            raise PrecisionLossError("argument path hit a zero")
        d = cmath.phase(v1 / v0)
        if abs(d) <= 1.0:
            return d, v1
        if depth >= 48:
            raise PrecisionLossError("argument continuation did not stabilize")
        mid = 0.5 * (s0 + s1)
        d0, vm = self._arg_segment(s0, v0, mid, depth + 1)
        d1, _ = self._arg_segment(mid, vm, s1, depth + 1)
        return d0 + d1, v1

    def count_zeros(self, T: float) -> int:
        """Number of zeros with 0 < gamma <= T by the argument principle."""
        if T <= 0.0:
            return 0
        raw = (float(self.theta(T)) + self._arg_continuation(T)) / math.pi
        if self.d == 1:
            raw += 1.0          # the s(s-1) factor completing zeta
        n = int(round(raw))
        if abs(raw - n) > 0.3:
            raise PrecisionLossError(
                f"argument count {raw:.3f} is not near an integer")
        return n


# ------------------------------------------------------------- zero finder

@dataclass
class ZeroSet:
    d: int
    conductor: int
    height_T: float
    gammas: np.ndarray          # positive ordinates, strictly increasing
    complete: bool
    count_expected: int
    central_zero: bool = False  # Z(0) = 0 detected (never observed)


def z_function(t: float, d: int) -> float:
    """Hardy Z(t) for chi_d: real rotation of L(1/2+it)."""
    return LFunction(d, height=max(abs(t), 1.0) + 5.0).z(t)


def dirichlet_L(s: complex, d: int) -> complex:
    """L(s, chi) for the real primitive character attached to d."""
    return LFunction(d, height=max(abs(complex(s).imag), 1.0) + 5.0).value(s)


def find_zeros(d: int, T: float) -> ZeroSet:
    """All zeros with 0 < gamma <= T, certified complete by the argument
    principle when possible (complete=False instead of raising when the
    six grid refinements are exhausted)."""
    if T > HEIGHT_BOUND:
        raise ValueError(f"height {T} exceeds {HEIGHT_BOUND}")
    q = conductor(d)
    if T <= 0.0:
        return ZeroSet(d, q, 0.0, np.empty(0), True, 0)
    lf = LFunction(d, height=T + 5.0)

    # avoid certifying at a height where Z is about to vanish
    T_eff = float(T)
    for _ in range(8):
        if abs(lf.z(T_eff)) > 1e-4:
            break
        T_eff -= 0.05
    try:
        expected = lf.count_zeros(T_eff)
    except PrecisionLossError:
        expected = -1

    dt = min(0.5, 1.0 / math.log(q * (T_eff + 3.0)))
    central = False
    gammas = np.empty(0)
    for _ in range(7):                 # initial grid + up to 6 refinements
        ts = np.linspace(0.0, T_eff, int(math.ceil(T_eff / dt)) + 1)
        zv, max_im = lf.z_values(ts)
        if max_im > 1e-7:
            raise PrecisionLossError(
                f"Z not real to tolerance (|Im| = {max_im:.2e}) for d={d}")
        central = abs(zv[0]) < 1e-10
        roots = []
        for i in range(ts.size - 1):
            a, b = float(zv[i]), float(zv[i + 1])
            if a == 0.0:
                if ts[i] > 0.0:
                    roots.append(float(ts[i]))
                continue
            if a * b < 0.0:
                roots.append(float(brentq(lf.z, float(ts[i]), float(ts[i + 1]),
                                          xtol=1e-10, rtol=8.9e-16)))
        gammas = np.array(sorted(set(roots)))
        if expected >= 0 and gammas.size + (1 if central else 0) == expected:
            break
        dt /= 2.0
    complete = expected >= 0 and (
        gammas.size + (1 if central else 0) == expected)
    return ZeroSet(d, q, T_eff, gammas, complete, expected, central)


# ------------------------------------------------------------------ cache

def cache_path(cache_dir, d: int) -> Path:
    return Path(cache_dir) / f"d{d}.zeros"


def save_zeros(zs: ZeroSet, cache_dir) -> Path:
    """One file per discriminant: 'd conductor T complete n' then the
    ordinates, 12 decimal digits."""
    if zs.central_zero:
        raise ValueError("cache format carries no central-zero flag")
    path = cache_path(cache_dir, zs.d)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{zs.d} {zs.conductor} {zs.height_T:.6f} "
             f"{1 if zs.complete else 0} {zs.gammas.size}"]
    lines += [f"{g:.12f}" for g in zs.gammas]
    path.write_text("\n".join(lines) + "\n")
    return path


def load_zeros(d: int, cache_dir, revalidate: bool = True) -> Optional[ZeroSet]:
    """Read a cached ZeroSet; returns None when absent or invalid.  A
    complete set is revalidated against a fresh argument-principle count."""
    path = cache_path(cache_dir, d)
    if not path.exists():
        return None
    try:
        lines = path.read_text().split()
        dd, q, T, comp, n = (int(lines[0]), int(lines[1]), float(lines[2]),
                             bool(int(lines[3])), int(lines[4]))
        gam = np.array([float(x) for x in lines[5: 5 + n]])
    except (ValueError, IndexError):
        return None
    if dd != d or q != conductor(d) or gam.size != n:
        return None
    if gam.size and not (np.all(np.diff(gam) > 0) and gam[0] > 0
                         and gam[-1] <= T + 1e-9):
        return None
    if comp and revalidate:
        try:
            if LFunction(d, height=T + 5.0).count_zeros(T) != n:
                return None
        except PrecisionLossError:
            return None
    return ZeroSet(d, q, T, gam, comp, n if comp else -1)


def find_zeros_cached(d: int, T: float, cache_dir=None) -> ZeroSet:
    # the finder may nudge the certification height down by up to 0.4 to
    # dodge a zero at the endpoint, so accept caches within 0.5 of T
    if cache_dir is not None:
        zs = load_zeros(d, cache_dir)
        if zs is not None and zs.complete and zs.height_T >= T - 0.5:
            return zs
    zs = find_zeros(d, T)
    if cache_dir is not None and zs.complete:
        save_zeros(zs, cache_dir)
    return zs


# -------------------------------------------------------- family statistic

def zero_tail_bound(phi: TestFunction, L_value: float, q: int,
                    T: float) -> float:
    """Certified bound on the mass of phi(gamma L / 2pi) beyond |gamma| > T,
    from the decay envelope |phi(x)| <= C x^{-k} and the crude counting
    bound N(t+1) - N(t) <= log(q(t+2))/pi + 2."""
    C = phi.decay_constant
    k = float(phi.decay_exponent)
    s = L_value / (2.0 * math.pi)
    dens = math.log(q * (T + 2.0)) / math.pi + 2.0 + math.log(3.0) / math.pi
    first = dens * C * (s * T) ** (-k)
    integral = C * s ** (-k) * T ** (1.0 - k) * (
        dens / (k - 1.0) + 1.0 / ((k - 1.0) ** 2 * math.pi))
    return 2.0 * (first + integral)


def zero_sum(zs: ZeroSet, phi: TestFunction, L_value: float,
             t_cap=None) -> float:
    """sum over +/- gamma of phi(gamma L / 2 pi) from a computed zero set.

    t_cap restricts to |gamma| <= t_cap so a set certified to a larger
    height can stand in for a shorter one without changing the statistic.
    """
    g = zs.gammas
    if t_cap is not None:
        g = g[g <= t_cap]
    val = 2.0 * float(np.sum(phi.phi(g * L_value / (2.0 * math.pi))))
    if zs.central_zero:
        val += float(phi.phi(0.0))
    return val


def empirical_density(spec: FamilySpec, phi: TestFunction, T: float,
                      cache_dir=None, threads: int = 1) -> tuple:
    """(value, truncation_bound): the fully empirical family density from
    computed zeros up to T, and a certified bound on what the cutoff can
    have discarded.  Refuses to average over incomplete zero sets."""
    L = scale_length(spec.X)

    def char_d(d: int) -> int:
        return 2 * d if spec.family == F_STAR else d

    ds = [char_d(int(d)) for d in spec.d_values]
    uniq = sorted(set(ds), key=abs)

    def one(dc: int) -> ZeroSet:
        return find_zeros_cached(dc, T, cache_dir)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            sets = dict(zip(uniq, ex.map(one, uniq)))
    else:
        sets = {dc: one(dc) for dc in uniq}

    bad = [dc for dc, zs in sets.items() if not zs.complete]
    if bad:
        raise RuntimeError(f"incomplete zero sets for d in {bad[:8]}")

    vals, bounds = [], []
    for d, wt in zip(spec.d_values, spec.d_weights):
        zs = sets[char_d(int(d))]
        t_eff = min(T, zs.height_T)
        vals.append(float(wt) * zero_sum(zs, phi, L, t_cap=t_eff))
        bounds.append(float(wt) * zero_tail_bound(phi, L, zs.conductor,
                                                  t_eff))
    W = spec.total_weight
    return fsum(vals) / W, fsum(bounds) / W
