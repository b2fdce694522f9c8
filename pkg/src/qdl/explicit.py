"""Exact one-level densities of quadratic-character families, zero-free.

Everything here is a finite sum: the density of a family is the weighted
average of the per-character explicit formula (archimedean terms plus a
prime-power sum truncated exactly by the compact support of phi_hat), so
none of it needs computed zeros.  Two families are supported.

  F_star : chi_{8d} with d odd squarefree, weight w(d/X).  Every such
           character is primitive with conductor 8|d| and kills p = 2.
  F_all  : chi_d over every d != 0 with weight w(d/X).  Since d and
           d m^2 give the same nontrivial zeros the family collapses
           onto squarefree d with the folded weight wtilde(d/X);
           d = 1 contributes zeta(s), pole included.

For F_all the per-character data admit two bookkeeping conventions.  The
"primitive" convention resolves chi_d to the primitive character of the
quadratic field: conductor |d| when d = 1 mod 4 and 4|d| otherwise, with
every value at p = 2 equal to zero unless d = 1 mod 4.  The "display"
convention keeps the naive Kronecker symbol (d/2^m) and assigns
conductor |d| to positive odd d, 4|d| otherwise.  The two agree exactly
for d = 1 mod 4 and for even d; elsewhere both the conductor and the
p = 2 terms differ.  Averaged over the sign-symmetric family, the two
conductor rules give identical archimedean terms (the slips cancel pair
by pair under d -> -d), but the p = 2 even-power sums do not cancel:
they differ by a term of size ~ (2 log 2 / 3) phi_hat(0) / L, because
the naive symbol counts every odd d at even powers of 2 while only the
d = 1 mod 4 third of the mass has a genuine Euler factor at 2.  The
closed-form expansions in `predict` are organized around the display
convention; zero sums (see `zeros`) match the primitive one character
by character.  `density` computes either, and `p2_convention_gap` gives
their exact difference.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import fsum, isqrt
from typing import Optional

import numpy as np

from .arith import SieveTables, digamma, euler_gamma_em, kronecker
from .numutil import chunked_dot, chunked_sum, quad_checked
from .testfn import TestFunction, phi_at_imaginary
from .weightfn import TWO_PI_E, WeightFunction, wtilde

F_STAR = "F_star"
F_ALL = "F_all"

_CONVENTIONS = ("primitive", "display")

# Kronecker (d/2) by residue d mod 8
_KRON2 = (0, 1, 0, -1, 0, -1, 0, 1)


def scale_length(X: float) -> float:
    """L = log(X / 2 pi e), the mean-spacing normalization of low zeros."""
    L = math.log(X / TWO_PI_E)
    if L <= 0.0:
        raise ValueError("X must exceed 2*pi*e for a positive scale length")
    return L


# ------------------------------------------------------------------ family

@dataclass
class FamilySpec:
    family: str
    X: float
    d_truncation: int
    tables: SieveTables
    weight: WeightFunction
    d_values: np.ndarray   # int64: positive squarefree block, then its negation
    d_weights: np.ndarray  # w(d/X) for F_star, wtilde(d/X) for F_all
    total_weight: float    # W*(X), or W(X) summed over all 0 < |d| <= D


def _d_truncation(weight: WeightFunction, X: float) -> int:
    """Smallest D with sum_{|d| > D} w(d/X) < 1e-14 W, recomputed from w.

    The scan stops at 1.25 * w_cut * X where the registered cut puts w
    below ~1e-26; what is dropped there is far under the threshold.
    """
    dmax = int(math.ceil(1.25 * weight.w_cut * X)) + 8
    vals = np.asarray(weight.w(np.arange(1, dmax + 1, dtype=float) / X),
                      dtype=float)
    suffix = np.cumsum(vals[::-1])[::-1]
    total = 2.0 * float(suffix[0])
    ok = 2.0 * suffix < 1e-14 * total   # ok[j]: the mass beyond |d| = j is small
    j = int(np.argmax(ok))
    if not bool(ok[j]):
        raise ValueError("weight tail never met the cutoff; w_cut too small?")
    return max(j, 1)


def build_family(family: str, X: float, weight: WeightFunction,
                 tables: SieveTables,
                 d_truncation: Optional[int] = None) -> FamilySpec:
    if family not in (F_STAR, F_ALL):
        raise ValueError(f"unknown family {family!r}")
    if X < 10.0:
        raise ValueError("X must be at least 10")
    D = int(d_truncation) if d_truncation is not None else _d_truncation(weight, X)
    if D > tables.limit:
        raise ValueError(
            f"need squarefree flags up to {D}, sieve stops at {tables.limit}")
    sf = np.nonzero(tables.squarefree[: D + 1])[0].astype(np.int64)
    if family == F_STAR:
        sf = sf[sf % 2 == 1]
        wt = np.asarray(weight.w(sf.astype(float) / X), dtype=float)
        total = 2.0 * chunked_sum(wt)
    else:
        wt = np.asarray(wtilde(weight, sf.astype(float) / X), dtype=float)
        # W(X) itself runs over all integers; the squarefree folding above
        # is the same quantity rearranged, and agrees to ~1e-14 relative.
        direct = np.asarray(
            weight.w(np.arange(1, D + 1, dtype=float) / X), dtype=float)
        total = 2.0 * chunked_sum(direct)
    return FamilySpec(
        family=family, X=float(X), d_truncation=D, tables=tables,
        weight=weight,
        d_values=np.concatenate([sf, -sf]),
        d_weights=np.concatenate([wt, wt]),
        total_weight=float(total),
    )


def total_weight(spec: FamilySpec) -> float:
    return spec.total_weight


def log_conductor_average(spec: FamilySpec) -> float:
    """Weighted average of log|d| over the family, as an exact finite sum.

    This is the variable part of the log-conductor; the constant parts
    (log 8, the 4^b split) are carried by the gamma-constant term of the
    breakdown.
    """
    n = spec.d_values.size // 2
    logs = np.log(spec.d_values[:n].astype(float))
    return 2.0 * chunked_dot(spec.d_weights[:n], logs) / spec.total_weight


# ------------------------------------------------------------- prime sums

def legendre_table(p: int) -> np.ndarray:
    """chi(r) for r mod p (p an odd prime), int8, built from the squares."""
    tab = np.full(p, -1, dtype=np.int8)
    tab[0] = 0
    half = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    tab[(half * half) % p] = 1
    return tab


def _char_masses(spec: FamilySpec) -> dict:
    """Weighted masses entering the p = 2 terms, keyed by convention.

    prim_*: the primitive character of Q(sqrt d) is nonzero at 2 only for
    d = 1 mod 4 (residues 1, 5 mod 8 carry chi(2) = +1, -1).
    raw_*: the naive symbol (d/2) = 0, +1, -1 by d mod 8 on every odd d.
    """
    d8 = spec.d_values % 8
    wt = spec.d_weights
    mass = [chunked_sum(wt[d8 == r]) for r in range(8)]
    return {
        "prim_odd": mass[1] - mass[5],
        "prim_even": mass[1] + mass[5],
        "raw_odd": mass[1] + mass[7] - mass[3] - mass[5],
        "raw_even": mass[1] + mass[3] + mass[5] + mass[7],
    }


def prime_sums(spec: FamilySpec, phi: TestFunction, threads: int = 1,
               p_cutoff: Optional[int] = None,
               convention: str = "primitive") -> tuple:
    """(S_odd, S_even): the odd/even prime-power halves of the prime sum,
    with the -2/(L W) prefactor included.

    Only p^m with m log p <= sigma L can contribute (phi_hat vanishes
    beyond its support), so both sums are exact finite sums; raising
    p_cutoff past exp(sigma L) appends exact zeros and changes nothing.
    """
    if convention not in _CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    L = scale_length(spec.X)
    cap = phi.sigma * L
    if cap < math.log(2.0):
        return 0.0, 0.0
    pmax = int(math.exp(cap)) if p_cutoff is None else int(p_cutoff)
    if pmax > spec.tables.limit:
        raise ValueError("prime range exceeds the sieve tables")
    primes = spec.tables.primes
    primes = primes[primes <= pmax]

    d = spec.d_values
    wt = spec.d_weights
    wt_total = chunked_sum(wt)
    star_sign = spec.family == F_STAR

    def char_sums(p: int) -> tuple:
        # one pass over the family: sum wt * chi(p) and sum wt * chi(p)^2
        tab = legendre_table(p)
        r = d % p
        t_odd = chunked_dot(wt, tab[r].astype(np.float64))
        t_even = wt_total - chunked_sum(wt[r == 0])
        if star_sign:
            t_odd *= kronecker(2, p)   # (8d/p) = (2/p)(d/p)
        return t_odd, t_even

    odd_primes = [int(p) for p in primes if p != 2]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            sums = list(ex.map(char_sums, odd_primes))
    else:
        sums = [char_sums(p) for p in odd_primes]

    terms_odd: list = []
    terms_even: list = []

    def push(p: int, t_odd: float, t_even: float) -> None:
        lp = math.log(p)
        m = 1
        while m * lp <= cap:
            hat = float(phi.phi_hat(m * lp / L))
            if hat != 0.0:
                c = lp * p ** (-0.5 * m) * hat
                (terms_odd if m % 2 == 1 else terms_even).append(
                    c * (t_odd if m % 2 == 1 else t_even))
            m += 1

    if spec.family == F_ALL and primes.size and primes[0] == 2:
        masses = _char_masses(spec)
        key = "prim" if convention == "primitive" else "raw"
        push(2, masses[key + "_odd"], masses[key + "_even"])
    for p, (t_odd, t_even) in zip(odd_primes, sums):
        push(p, t_odd, t_even)

    pref = -2.0 / (L * spec.total_weight)
    return pref * fsum(terms_odd), pref * fsum(terms_even)


# -------------------------------------------------------- archimedean part

def gamma_integral(phi: TestFunction, L_value: float,
                   parity: Optional[int] = None,
                   abs_tol: float = 1e-13) -> float:
    """(1/L) int_0^inf kern(x)/(1 - e^{-2x}) (phihat(0) - phihat(x/L)) dx.

    kern = e^{-x/2} + e^{-3x/2} mixes the two sign classes half and half
    (the family's positive and negative masses are identical); parity 0
    or 1 selects 2 e^{-(1/2+parity)x} for a single character instead.
    The integrand extends continuously at x = 0 and the adaptive rule
    never evaluates the endpoint, so no special casing is needed; beyond
    sigma L the phihat term dies and the remaining tail is summed as a
    geometric series of exponential integrals.
    """
    if L_value <= 0.0:
        raise ValueError("scale length must be positive")
    if parity is None:
        coeffs = ((1.0, 0.5), (1.0, 1.5))
    elif parity in (0, 1):
        coeffs = ((2.0, 0.5 + parity),)
    else:
        raise ValueError("parity must be 0, 1 or None")
    hat0 = float(phi.phi_hat(0.0))
    xmax = phi.sigma * L_value

    def f(x: float) -> float:
        kern = fsum(c * math.exp(-b * x) for c, b in coeffs)
        return kern / -math.expm1(-2.0 * x) * (hat0 - float(phi.phi_hat(x / L_value)))

    pts = sorted({0.0, xmax, *(k * L_value for k in phi.hat_knots)})
    parts = [quad_checked(f, lo, hi, abs_tol=abs_tol, rel_tol=1e-10)
             for lo, hi in zip(pts[:-1], pts[1:]) if hi > lo]

    tail: list = []
    for c, b in coeffs:
        k = 0
        while True:
            t = c * math.exp(-(b + 2.0 * k) * xmax) / (b + 2.0 * k)
            tail.append(t)
            if t < 1e-17 * max(1.0, abs(hat0)) or k > 4000:
                break
            k += 1
    return (fsum(parts) + hat0 * fsum(tail)) / L_value


# ----------------------------------------------------------------- density

@dataclass
class DensityBreakdown:
    L_value: float
    total_weight: float
    term_log_conductor: float
    term_gamma_constant: float
    term_S_odd: float
    term_S_even: float
    term_gamma_integral: float
    term_pole: float
    total: float


def density(spec: FamilySpec, phi: TestFunction,
            weight: Optional[WeightFunction] = None, threads: int = 1,
            convention: str = "primitive") -> DensityBreakdown:
    """The exact family density, split into the terms of the explicit
    formula.  `total` is the plain sum of the other terms.

    Every term mirrors the weighted average of `single_L_density` over
    the family arrays, so the two agree to floating-point rounding.
    """
    if convention not in _CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    wf = spec.weight if weight is None else weight
    if weight is not None and weight.name != spec.weight.name:
        raise ValueError("weight disagrees with the one the family was built with")
    L = scale_length(spec.X)
    W = spec.total_weight
    hat0 = float(phi.phi_hat(0.0))
    nhalf = spec.d_values.size // 2
    pos = spec.d_values[:nhalf]
    wt_pos = spec.d_weights[:nhalf]
    w_side = chunked_sum(wt_pos)    # each sign block carries this mass

    avg_logd = 2.0 * chunked_dot(wt_pos, np.log(pos.astype(float))) / W
    term_logc = hat0 / L * avg_logd

    if spec.family == F_STAR or convention == "primitive":
        avg_psi = w_side * (digamma(0.25) + digamma(0.75)) / W
        if spec.family == F_STAR:
            extra = math.log(8.0)
        else:
            mass_b = chunked_sum(spec.d_weights[spec.d_values % 4 != 1])
            extra = math.log(4.0) * mass_b / W
        term_gc = hat0 / L * (extra - math.log(math.pi) + avg_psi)
    else:
        # the display regrouping: gamma + log 4 (1 - Q), Q the positive
        # even mass re-indexed through wtilde(2d/X) over odd d
        odd_pos = pos[(pos % 2 == 1) & (2 * pos <= spec.d_truncation)]
        qmass = chunked_sum(wtilde(wf, 2.0 * odd_pos.astype(float) / spec.X))
        term_gc = -hat0 / L * (math.log(math.pi) + euler_gamma_em()
                               + math.log(4.0) * (1.0 - qmass / W))

    s_odd, s_even = prime_sums(spec, phi, threads=threads,
                               convention=convention)

    gi = w_side * (gamma_integral(phi, L, parity=0)
                   + gamma_integral(phi, L, parity=1)) / W

    if spec.family == F_ALL and pos.size and int(pos[0]) == 1:
        term_pole = 2.0 * float(wt_pos[0]) * phi_at_imaginary(phi, L) / W
    else:
        term_pole = 0.0

    total = fsum((term_logc, term_gc, s_odd, s_even, gi, term_pole))
    return DensityBreakdown(
        L_value=L, total_weight=W,
        term_log_conductor=term_logc, term_gamma_constant=term_gc,
        term_S_odd=s_odd, term_S_even=s_even,
        term_gamma_integral=gi, term_pole=term_pole, total=total,
    )


def p2_convention_gap(spec: FamilySpec, phi: TestFunction) -> float:
    """density(primitive) - density(display), predicted in closed form.

    Only the p = 2 prime powers differ between the conventions; the two
    archimedean regroupings agree exactly because the family is sign
    symmetric (mass{d<0, d=1 mod 4} = mass{d>0, d=3 mod 4} pairs off the
    conductor slips, and the positive mass identity P(+odd) + Q = 1/2
    squares the gamma constants).
    """
    if spec.family != F_ALL:
        return 0.0
    L = scale_length(spec.X)
    cap = phi.sigma * L
    if cap < math.log(2.0):
        return 0.0
    m = _char_masses(spec)
    l2 = math.log(2.0)
    terms = []
    k = 1
    while k * l2 <= cap:
        hat = float(phi.phi_hat(k * l2 / L))
        diff = (m["prim_odd"] - m["raw_odd"] if k % 2 == 1
                else m["prim_even"] - m["raw_even"])
        terms.append(l2 * 2.0 ** (-0.5 * k) * hat * diff)
        k += 1
    return -2.0 / (L * spec.total_weight) * fsum(terms)


# ---------------------------------------------------------- one character

def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return False
        else:
            f += 1
    return True


def _small_primes(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def conductor(d: int, family: str = F_ALL, convention: str = "primitive") -> int:
    """Conductor of the character attached to d (8|d| in the F_star
    normalization; for F_all, |d| exactly when d = 1 mod 4)."""
    if not _is_squarefree(d):
        raise ValueError(f"d = {d} is not squarefree")
    ad = abs(d)
    if family == F_STAR:
        if d % 2 == 0:
            raise ValueError("the 8d family takes odd d")
        return 8 * ad
    if convention == "primitive":
        return ad if d % 4 == 1 else 4 * ad
    return ad if (d > 0 and d % 2 == 1) else 4 * ad


def character_value(d: int, p: int, family: str = F_ALL,
                    convention: str = "primitive") -> int:
    """chi(p) for the character attached to d, at a prime p."""
    if family == F_STAR:
        return 0 if p == 2 else kronecker(8 * d, p)
    if p != 2:
        return kronecker(d, p)
    if convention == "primitive":
        if d % 4 != 1:
            return 0
        return 1 if d % 8 == 1 else -1
    return _KRON2[d % 8]


def single_L_density(d: int, phi: TestFunction, X: float,
                     family: str = F_ALL, convention: str = "primitive",
                     tables: Optional[SieveTables] = None) -> float:
    """sum over zeros phi(gamma L / 2 pi) for one character, evaluated as
    the per-character explicit formula (archimedean + primes + pole).

    The default convention takes the primitive character of Q(sqrt d);
    that is the version the actual zero sums reproduce.
    """
    if d == 0 or not _is_squarefree(d):
        raise ValueError(f"d = {d} is not a nonzero squarefree integer")
    if family not in (F_STAR, F_ALL):
        raise ValueError(f"unknown family {family!r}")
    if convention not in _CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    L = scale_length(X)
    a = 0 if d > 0 else 1
    q = conductor(d, family, convention)
    hat0 = float(phi.phi_hat(0.0))
    out = [hat0 / L * (math.log(q / math.pi) + digamma(0.25 + 0.5 * a))]

    cap = phi.sigma * L
    if cap >= math.log(2.0):
        pmax = int(math.exp(cap))
        if tables is not None:
            if pmax > tables.limit:
                raise ValueError("prime range exceeds the sieve tables")
            primes = tables.primes[tables.primes <= pmax]
        else:
            primes = _small_primes(pmax)
        terms = []
        for p in primes:
            p = int(p)
            e = character_value(d, p, family, convention)
            if e == 0:
                continue
            lp = math.log(p)
            m = 1
            while m * lp <= cap:
                hat = float(phi.phi_hat(m * lp / L))
                if hat != 0.0:
                    terms.append((e ** m) * lp * p ** (-0.5 * m) * hat)
                m += 1
        out.append(-2.0 / L * fsum(terms))

    if family == F_ALL and d == 1:
        out.append(2.0 * phi_at_imaginary(phi, L))
    out.append(gamma_integral(phi, L, parity=a))
    return fsum(out)
