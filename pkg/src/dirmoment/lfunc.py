"""Central values of Dirichlet L-functions, two independent ways.

The oracle route evaluates L(1/2, chi) for primitive chi through the
Hurwitz zeta function,

    L(1/2, chi) = q^(-1/2) sum_{a=1}^{q} chi(a) zeta(1/2, a/q),

with zeta(s, a) computed by Euler-Maclaurin summation.  The smoothed
route evaluates the rapidly truncating double sum

    A(chi) = sum_{a,b >= 1} chi(a) chibar(b) / sqrt(ab) * W_a(pi a b / q),

which satisfies |L(1/2, chi)|^2 = 2 A(chi) for primitive chi.  A is split
as B + C at the product threshold Z = q / 2^omega(q); the B/C membership
test is the exact integer predicate a*b * 2^omega(q) <= q.

The double sum is accumulated with compensated (Kahan) summation in a
fixed order: increasing product ab, ties by increasing a.  That order is
part of the reproducibility contract; it never changes with threading or
batching choices elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import two_pow_omega
from .chargroup import CharacterGroup, CharacterLabel, root_of_unity
from .kernel import KernelConfig, w_eval_batch

__all__ = [
    "CentralValue",
    "KernelWeights",
    "hurwitz_zeta",
    "kernel_weights",
    "l_half_oracle",
    "abc_values",
]

# B_{2j} for 2j = 2..28; enough for ~1e-30 headroom at N ~ 24 shifted terms
_BERNOULLI = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6),
    Fraction(-3617, 510), Fraction(43867, 798), Fraction(-174611, 330),
    Fraction(854513, 138), Fraction(-236364091, 2730),
    Fraction(8553103, 6), Fraction(-23749461029, 870),
)
_B_OVER_FACT = tuple(
    float(b / math.factorial(2 * (j + 1))) for j, b in enumerate(_BERNOULLI))

_MAX_PAIRS = 60_000_000  # guard on the naive pair enumeration


def hurwitz_zeta(s: float, a: float, *, n_terms: int = 24,
                 j_terms: int = 12) -> float:
    """zeta(s, a) = sum_{k>=0} (k + a)^(-s) by Euler-Maclaurin.

    Supported region: real 0 < s < 1 (continuation through the shifted
    tail integral) and a > 0.  With the default depths the truncation
    error is far below double rounding for a >= 1e-3.
    """
    if not (isinstance(s, (int, float)) and 0.0 < s < 1.0):
        raise ValueError(f"s must be a real number in (0, 1), got {s}")
    if not (isinstance(a, (int, float)) and a > 0.0 and math.isfinite(a)):
        raise ValueError(f"a must be a positive real, got {a}")
    if j_terms > len(_B_OVER_FACT):
        raise ValueError(f"j_terms capped at {len(_B_OVER_FACT)}")
    s = float(s)
    a = float(a)
    direct = math.fsum((a + k) ** (-s) for k in range(n_terms))
    na = a + n_terms
    corr = [na ** (1.0 - s) / (s - 1.0), 0.5 * na ** (-s)]
    poch = s                      # (s)(s+1)...(s+2j-2), one factor so far
    napow = na ** (-s - 1.0)      # na^(-s-2j+1) at j = 1
    inv_na_sq = 1.0 / (na * na)
    for j in range(j_terms):
        corr.append(_B_OVER_FACT[j] * poch * napow)
        poch *= (s + 2 * j + 1) * (s + 2 * j + 2)
        napow *= inv_na_sq
    return direct + math.fsum(corr)


def l_half_oracle(G: CharacterGroup, chi: CharacterLabel) -> complex:
    """L(1/2, chi) for primitive chi mod q >= 3 via Hurwitz zeta values."""
    q = G.q
    if q < 3 or not chi.primitive:
        raise ValueError(
            "the Hurwitz-zeta route needs a primitive character of modulus"
            f" >= 3; got q = {q}, primitive = {chi.primitive}")
    N = G.exponent
    re: list[float] = []
    im: list[float] = []
    for a in range(1, q):
        num = G.angle_num(chi, a)
        if num is None:
            continue
        z = root_of_unity(num, N)
        hz = hurwitz_zeta(0.5, a / q)
        re.append(z.real * hz)
        im.append(z.imag * hz)
    return complex(math.fsum(re), math.fsum(im)) / math.sqrt(q)


@dataclass
class KernelWeights:
    """Kernel values shared verbatim by every pipeline at one modulus.

    w[a][m] = W_a(pi m / q) and kprod[a][m] = W_a(pi m / q) / sqrt(m) for
    1 <= m <= m_eff; index 0 is zero padding.  m_eff is the effective
    truncation: products beyond it sit past the kernel's hard zero cutoff
    (or past the configured analytic truncation bound, whichever is
    smaller), so every sum over ab can stop there.
    """

    q: int
    cfg: KernelConfig
    z_floor: int   # largest m with m * 2^omega(q) <= q
    m_eff: int
    w: tuple[np.ndarray, np.ndarray]
    kprod: tuple[np.ndarray, np.ndarray]

    def kprod_list(self, parity: int) -> list[float]:
        cached = getattr(self, "_kp_lists", None)
        if cached is None:
            cached = [None, None]
            self._kp_lists = cached
        if cached[parity] is None:
            cached[parity] = self.kprod[parity].tolist()
        return cached[parity]


def truncation_bound(q: int, cfg: KernelConfig) -> int:
    """Effective upper bound for products ab in the smoothed sums."""
    analytic = q * max(40.0, math.log(1.0 / cfg.eps) ** 2)
    hard_zero = math.floor(cfg.x_zero * q / math.pi)
    return max(1, min(int(analytic), int(hard_zero)))


def kernel_weights(q: int, cfg: KernelConfig = KernelConfig()) -> KernelWeights:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    m_eff = truncation_bound(q, cfg)
    z_floor = q // two_pow_omega(q)
    m = np.arange(m_eff + 1, dtype=np.float64)
    x = math.pi * m[1:] / q
    w0 = np.zeros(m_eff + 1)
    w1 = np.zeros(m_eff + 1)
    w0[1:] = w_eval_batch(0, x, cfg)
    w1[1:] = w_eval_batch(1, x, cfg)
    inv_sqrt = np.zeros(m_eff + 1)
    inv_sqrt[1:] = 1.0 / np.sqrt(m[1:])
    return KernelWeights(q, cfg, z_floor, m_eff,
                         (w0, w1), (w0 * inv_sqrt, w1 * inv_sqrt))


@dataclass(frozen=True)
class CentralValue:
    """Smoothed-sum output for one character, with the oracle alongside."""

    label: CharacterLabel
    q: int
    a_value: float    # A = B + C
    b_value: float    # head: products ab <= Z
    c_value: float    # tail: Z < ab <= m_eff
    imag_residue: float
    m_eff: int
    l_oracle: Optional[complex] = None


_PAIR_CACHE: dict[tuple[int, int], tuple[list[tuple[int, int]], int]] = {}


def _pairs(q: int, m_eff: int, z_floor: int) -> tuple[list[tuple[int, int]], int]:
    """Coprime pairs (ab, a) with ab <= m_eff, sorted by (ab, a); returns
    the list and the count of entries with ab <= z_floor (a prefix)."""
    key = (q, m_eff)
    hit = _PAIR_CACHE.get(key)
    if hit is not None:
        return hit
    est = m_eff * (math.log(m_eff) + 1.0)
    if est > _MAX_PAIRS:
        raise ValueError(
            f"naive pair enumeration would need ~{est:.2e} entries; "
            "use the weight-table pipeline at this modulus")
    pairs: list[tuple[int, int]] = []
    for a in range(1, m_eff + 1):
        if math.gcd(a, q) != 1:
            continue
        for b in range(1, m_eff // a + 1):
            if math.gcd(b, q) == 1:
                pairs.append((a * b, a))
    pairs.sort()
    lo, hi = 0, len(pairs)
    while lo < hi:
        mid = (lo + hi) // 2
        if pairs[mid][0] <= z_floor:
            lo = mid + 1
        else:
            hi = mid
    if len(_PAIR_CACHE) > 8:
        _PAIR_CACHE.clear()
    _PAIR_CACHE[key] = (pairs, lo)
    return pairs, lo


def abc_values(G: CharacterGroup, chi: CharacterLabel,
               cfg: KernelConfig = KernelConfig(), *,
               weights: Optional[KernelWeights] = None,
               with_oracle: bool = False) -> CentralValue:
    """A(chi), B(chi), C(chi) by direct compensated summation.

    This is the reference pipeline: one character at a time, fixed term
    order, no residue grouping.  Shares kernel values through `weights`
    so that comparisons against the table pipeline test only the
    reorganization of the sum.
    """
    q = G.q
    if weights is None:
        weights = kernel_weights(q, cfg)
    elif weights.q != q or weights.cfg != cfg:
        raise ValueError("weights were built for a different modulus or config")
    pairs, n_b = _pairs(q, weights.m_eff, weights.z_floor)
    kp = weights.kprod_list(chi.parity)
    N = G.exponent
    tab = [0j] * max(q, 1)
    for u in range(max(q, 1)):
        num = G.angle_num(chi, u)
        if num is not None:
            tab[u] = root_of_unity(num, N)
    tabc = [z.conjugate() for z in tab]

    sums = []
    for chunk in (pairs[:n_b], pairs[n_b:]):
        # inline Kahan on real and imaginary parts, fixed order
        tr = cr = 0.0
        ti = ci = 0.0
        for m, a in chunk:
            z = tab[a % q] * tabc[(m // a) % q]
            w = kp[m]
            y = z.real * w - cr
            t = tr + y
            cr = (t - tr) - y
            tr = t
            y = z.imag * w - ci
            t = ti + y
            ci = (t - ti) - y
            ti = t
        sums.append((tr, ti))
    (b_re, b_im), (c_re, c_im) = sums
    oracle = None
    if with_oracle:
        oracle = l_half_oracle(G, chi)
    return CentralValue(
        label=chi, q=q, a_value=b_re + c_re, b_value=b_re, c_value=c_re,
        imag_residue=max(abs(b_im), abs(c_im)), m_eff=weights.m_eff,
        l_oracle=oracle)
