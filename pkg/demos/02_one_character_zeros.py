"""Zeros of one quadratic L-function against its explicit formula.

Low-lying zeros are found as sign changes of the rotated (real) Z
function, certified complete against the argument-principle count, and
then fed into the density statistic sum phi(gamma L / 2pi).  The same
quantity has a closed evaluation: conductor and digamma terms, a finite
prime sum, and an archimedean integral.  The two must agree to the
certified tail bound, zero cache or not.
"""

import math
import tempfile
from pathlib import Path

from qdl.explicit import conductor, scale_length, single_L_density
from qdl.testfn import fejer_squared
from qdl.zeros import find_zeros_cached, zero_sum, zero_tail_bound

d = -11                       # chi_{-11}, odd character, conductor 11
T = 80.0                      # zero search height
X = 500.0                     # density scale; L = log(X / 2 pi e)
phi = fejer_squared(0.9)
L = scale_length(X)

cache = Path(tempfile.mkdtemp()) / "zeros"
zs = find_zeros_cached(d, T, cache)
print(f"d = {d}, conductor {conductor(d)}, zeros to T = {T:g}")
print(f"  found {zs.gammas.size} zeros, complete = {zs.complete}")
print(f"  lowest: " + ", ".join(f"{g:.6f}" for g in zs.gammas[:5]))

# the cache is a plain text file: one header line (d, conductor, T,
# completeness flag, count), then one gamma per line at 12 digits
path = next(cache.glob("*.zeros"))
head = path.read_text().splitlines()
print(f"  cache file {path.name}: header '{head[0]}'")
print()

lhs = zero_sum(zs, phi, L)
rhs = single_L_density(d, phi, X)
tail = zero_tail_bound(phi, L, conductor(d), T)
print(f"sum over zeros           {lhs:+.8f}")
print(f"explicit formula         {rhs:+.8f}")
print(f"difference               {abs(lhs - rhs):.2e}   (tail bound {tail:.2e})")
print()

# the balance persists for the trivial character, where the pole of
# zeta contributes the imaginary-argument term
lhs1 = zero_sum(find_zeros_cached(1, T, cache), phi, L)
rhs1 = single_L_density(1, phi, X)
print(f"d = 1 (zeta): zeros {lhs1:+.8f} vs formula {rhs1:+.8f} "
      f"(diff {abs(lhs1 - rhs1):.2e})")
print("the first gamma above is the classical 14.134725...")
