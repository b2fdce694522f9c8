"""Elementary prime-side arithmetic: sieves, Kronecker symbols, Chebyshev
sums, and the small zoo of analytic constants everything downstream leans on.

All series with more than a handful of terms go through math.fsum, which is
exactly rounded and therefore permutation-invariant; the tables returned by
build_sieves are plain numpy arrays so the heavy per-prime loops elsewhere can
fancy-index into them.

Constants (Euler gamma, zeta values and derivatives, digamma at the quarter
points) are computed here by Euler-Maclaurin / Stirling series with explicit
error control instead of being pasted in as opaque literals; tests compare
them against closed forms where those exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import fsum, isqrt, log

import numpy as np

# Exact Bernoulli numbers B_2 .. B_30; enough for 1e-14 relative targets once
# the Euler-Maclaurin start index is adapted to |s|.
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6),
    Fraction(-3617, 510), Fraction(43867, 798), Fraction(-174611, 330),
    Fraction(854513, 138), Fraction(-236364091, 2730), Fraction(8553103, 6),
    Fraction(-23749461029, 870), Fraction(8615841276005, 14322),
]
_B2K = [float(b) for b in _BERNOULLI]


@dataclass
class SieveTables:
    """Shared sieve output up to `limit` (inclusive)."""

    limit: int
    primes: np.ndarray        # int64, ascending
    log_primes: np.ndarray    # float64, log of primes
    mobius: np.ndarray        # int8, mobius[n] for 0 <= n <= limit
    squarefree: np.ndarray    # bool, mobius != 0 (squarefree[0] is False)


def build_sieves(limit: int) -> SieveTables:
    """Sieve primes, Mobius values and squarefree flags up to limit."""
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    primes = np.nonzero(is_prime)[0].astype(np.int64)

    mobius = np.ones(limit + 1, dtype=np.int8)
    mobius[0] = 0
    for p in primes:
        mobius[p:: p] *= -1
        sq = int(p) * int(p)
        if sq <= limit:
            mobius[sq:: sq] = 0
    squarefree = mobius != 0

    return SieveTables(
        limit=limit,
        primes=primes,
        log_primes=np.log(primes.astype(np.float64)),
        mobius=mobius,
        squarefree=squarefree,
    )


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for arbitrary integers, including n <= 0."""
    if n == 0:
        return 1 if d in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if d < 0:
            sign = -sign
    # factor out 2s of n; (d/2) = 0, +1, -1 according to d mod 8
    if n % 2 == 0:
        if d % 2 == 0:
            return 0
        two = 1 if d % 8 in (1, 7) else -1
        while n % 2 == 0:
            n //= 2
            sign *= two
    d %= n
    # reciprocity loop for odd n > 0
    while d != 0:
        # strip 2s of d
        while d % 2 == 0:
            d //= 2
            if n % 8 in (3, 5):
                sign = -sign
        d, n = n, d
        if d % 4 == 3 and n % 4 == 3:
            sign = -sign
        d %= n
    return sign if n == 1 else 0


def chebyshev_theta(y: float, tables: SieveTables) -> float:
    """theta(y) = sum of log p over primes p <= y."""
    if y > tables.limit:
        raise ValueError("theta query beyond sieve limit")
    if y < 2:
        return 0.0
    idx = int(np.searchsorted(tables.primes, math.floor(y), side="right"))
    return fsum(tables.log_primes[:idx])


def harmonic(u: float) -> float:
    """H_u = sum_{n <= u} 1/n (zero for u < 1)."""
    m = math.floor(u)
    if m < 1:
        return 0.0
    return fsum(1.0 / n for n in range(1, m + 1))


def prime_constant(P: float, tables: SieveTables) -> tuple[float, float]:
    """sum_{3 <= p <= P} log p / (p (p^2 - 1)) and a tail bound for p > P.

    The tail is below sum_{n > P} log n / n^3 <= (log P + 1/2) / (2 P^2),
    already counting every integer as if it were prime.
    """
    if P > tables.limit:
        raise ValueError("cutoff beyond sieve limit")
    ps = tables.primes[(tables.primes >= 3) & (tables.primes <= P)]
    val = fsum(math.log(int(p)) / (int(p) * (int(p) ** 2 - 1)) for p in ps)
    tail = (math.log(max(P, 3.0)) + 0.5) / (2.0 * max(P, 3.0) ** 2)
    return val, tail


def theta_integral(T: float, tables: SieveTables) -> float:
    """int_2^T (theta(t) - t) / t^2 dt, exactly (theta is a step function).

    Integrating the steps gives sum_{p <= T} log p (1/p - 1/T) - log(T/2).
    """
    if T > tables.limit:
        raise ValueError("integration endpoint beyond sieve limit")
    if T <= 2:
        return 0.0
    mask = tables.primes <= T
    ps = tables.primes[mask].astype(np.float64)
    lp = tables.log_primes[mask]
    main = fsum(lp / ps) - fsum(lp) / T
    return main - math.log(T / 2.0)


def theta_integral_tail_bound(T: float) -> float:
    """Envelope for |int_T^inf (theta(t)-t)/t^2 dt| from |theta(t)-t| <=
    sqrt(t) log^2 t / (8 pi) (valid for t >= 599 on RH; used as a numeric
    shadow, so the label says envelope rather than theorem)."""
    if T < 599:
        raise ValueError("tail envelope needs T >= 599")
    lt = math.log(T)
    return 2.0 * (lt * lt + 4.0 * lt + 8.0) / (8.0 * math.pi * math.sqrt(T))


def psi_theta_gap_constant(tables: SieveTables) -> tuple[float, float]:
    """sum_p log p / (p (p - 1)) with a residual bound (prime powers >= p^2).

    Writing the tail sum_{p > P} as a Stieltjes integral against theta and
    replacing theta(t) by t leaves exactly log(P/(P-1)), which is added to
    the sieved sum; what remains is controlled by the same |theta(t) - t|
    envelope as theta_integral_tail_bound and sits near 1e-8 for the sieve
    sizes in use (versus the 1/P ~ 1e-6 lost by truncating bare).
    """
    ps = tables.primes.astype(np.float64)
    val = fsum(tables.log_primes / (ps * (ps - 1.0)))
    P = float(tables.limit)
    val += math.log(P / (P - 1.0))
    lt = math.log(P)
    tail = (lt * lt + 4.0 * lt + 8.0) / (4.0 * math.pi * P ** 1.5)
    return val, tail


# --- Euler-Maclaurin machinery -------------------------------------------

def euler_maclaurin_hurwitz(s, a: float, deriv: int = 0):
    """zeta(s, a) (deriv=0) or d/ds zeta(s, a) (deriv=1) by Euler-Maclaurin.

    Start index N is adapted so the first omitted Bernoulli correction is
    below 1e-14 of the accumulated value within the B_30 budget; N doubles
    until that holds.  s may be complex (s != 1); a > 0.
    """
    if a <= 0:
        raise ValueError("hurwitz parameter a must be positive")
    s = complex(s)
    if s == 1:
        raise ValueError("pole at s = 1")
    if deriv not in (0, 1):
        raise ValueError("deriv must be 0 or 1")
    if deriv == 1 and s.imag == 0 and s.real <= 0 and s.real == int(s.real):
        raise ValueError("derivative not implemented at nonpositive integers")

    N = max(12, int(1.2 * abs(s.imag)) + 8)
    for _ in range(30):
        base = N + a
        logb = math.log(base)
        ns = np.arange(N, dtype=np.float64) + a
        logns = np.log(ns)
        powers = np.exp(-s * logns)
        if deriv == 0:
            total = powers.sum()
            total += np.exp(-s * logb) * base / (s - 1.0)
            total += 0.5 * np.exp(-s * logb)
        else:
            total = (-logns * powers).sum()
            bp = np.exp(-s * logb)
            total += (-logb * bp * base / (s - 1.0)
                      - bp * base / (s - 1.0) ** 2
                      - 0.5 * logb * bp)

        poch = s                    # (s)_{2k-1} for k = 1
        rsum = 1.0 / s if s != 0 else 0.0   # d log poch / ds
        fact = 2.0                  # (2k)! for k = 1
        scale = abs(total) + 1e-300
        converged = False
        for k in range(1, 16):
            coeff = _B2K[k - 1] / fact
            apow = np.exp((-s - (2 * k - 1)) * logb)
            if deriv == 0:
                total += coeff * poch * apow
            else:
                total += coeff * poch * apow * (rsum - logb)
            if k == 15:
                break
            poch = poch * (s + 2 * k - 1) * (s + 2 * k)
            rsum = rsum + 1.0 / (s + 2 * k - 1) + 1.0 / (s + 2 * k)
            fact *= (2 * k + 1) * (2 * k + 2)
            nxt = abs(_B2K[k] / fact * poch) * base ** (-s.real - 2 * k - 1)
            if nxt < 1e-14 * scale:
                # next term is negligible; add it anyway and stop
                apow = np.exp((-s - (2 * k + 1)) * logb)
                if deriv == 0:
                    total += _B2K[k] / fact * poch * apow
                else:
                    total += _B2K[k] / fact * poch * apow * (rsum - logb)
                converged = True
                break
        if converged:
            return total
        N *= 2
    raise RuntimeError("euler_maclaurin_hurwitz failed to converge")


def zeta_value(s, deriv: int = 0):
    """Riemann zeta (or its s-derivative) via Euler-Maclaurin at a = 1."""
    return euler_maclaurin_hurwitz(s, 1.0, deriv=deriv)


def euler_gamma_em(N: int = 40) -> float:
    """Euler's constant from H_N - log N with Bernoulli corrections."""
    h = fsum(1.0 / n for n in range(1, N + 1))
    val = h - math.log(N) - 0.5 / N
    npow = float(N) ** 2
    for k in range(1, 8):
        val += _B2K[k - 1] / (2 * k) / npow
        npow *= N * N
    return val


def digamma(x: float) -> float:
    """Real digamma by Stirling series after lifting to x >= 12."""
    if x <= 0:
        raise ValueError("digamma implemented for x > 0 only")
    acc = 0.0
    while x < 12.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for k in range(1, 9):
        series += _B2K[k - 1] / (2 * k) * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


@dataclass
class Constants:
    """Derived analytic constants with attached truncation uncertainties."""

    euler_gamma: float
    zeta_2: float
    zeta_half: float
    zeta_prime_over_zeta_at_2: float
    prime_constant_value: float        # sum_{p>=3} log p/(p(p^2-1))
    prime_constant_tail: float
    theta_integral_value: float        # int_2^inf (theta(t)-t)/t^2 dt
    theta_integral_uncertainty: float
    psi_quarter: float                 # digamma(1/4)
    psi_three_quarters: float


def compute_constants(tables: SieveTables) -> Constants:
    """Assemble the constant block from one sieve.

    The limiting value of the theta integral comes from the exact identity
    int_1^inf (psi(t)-t)/t^2 dt = -(gamma+1), which converts the divergent-
    looking tail into log 2 minus the fast prime-power sum log p/(p(p-1)):
    this is orders of magnitude sharper than integrating theta directly and
    is cross-checked against the direct finite integral in the tests.
    """
    gamma = euler_gamma_em()
    pc, pc_tail = prime_constant(float(tables.limit), tables)
    gap, gap_tail = psi_theta_gap_constant(tables)
    theta_val = -(gamma + 1.0) + math.log(2.0) - gap
    return Constants(
        euler_gamma=gamma,
        zeta_2=zeta_value(2.0).real,
        zeta_half=zeta_value(0.5).real,
        zeta_prime_over_zeta_at_2=(zeta_value(2.0, deriv=1)
                                   / zeta_value(2.0)).real,
        prime_constant_value=pc,
        prime_constant_tail=pc_tail,
        theta_integral_value=theta_val,
        theta_integral_uncertainty=gap_tail,
        psi_quarter=digamma(0.25),
        psi_three_quarters=digamma(0.75),
    )
