"""Pole orders, leading constants and the Z/p^2 discriminant-probability products.

All Euler products are multiplied in increasing prime order.  The leading
constant is enclosed with mpmath interval arithmetic; the discriminant
products sum float64 logarithms with an explicit rounding budget and then
round outward, which is what makes truncations at 10^8 affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np
from mpmath import iv

from .counting import CountingFunction, discriminant_counting, fairness
from .groups import FiniteAbelianGroup
from .primes import iter_prime_blocks, primes_below
from .stats import ProbabilityEstimate, conditional_probability, split_completely, unramified_at
from .units import all_local_characters, all_local_specs, discrete_log, unit_group
from .viability import e_group, s0, sp, viable_partial

iv.prec = 80


def _iv(x) -> "iv.mpf":
    return iv.mpf(x)


def _lo(x) -> mpmath.mpf:
    return mpmath.mpf(x.a)


def _hi(x) -> mpmath.mpf:
    return mpmath.mpf(x.b)


# --- pole order ----------------------------------------------------------------


def pole_order(C: CountingFunction) -> Fraction:
    """sum over g in frakM of 1/phi(r_g)."""
    G = C.group
    return sum((Fraction(1, _phi(G.element_order(g))) for g in C.frakM), Fraction(0))


def _phi(n: int) -> int:
    out = n
    for p in range(2, n + 1):
        if n % p == 0 and all(p % d for d in range(2, p)):
            out = out // p * (p - 1)
    return out


# --- Dirichlet characters needed for acceleration ---------------------------------


@dataclass(frozen=True)
class PrimitiveCharacter:
    conductor: int
    phases: tuple  # phases[a] in Q/Z for 0 <= a < conductor, None when gcd(a, f) > 1

    def value(self, a: int) -> complex:
        t = self.phases[a % self.conductor]
        if t is None:
            return 0j
        return complex(mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator))


def primitive_characters(r: int) -> list:
    """Nontrivial primitive characters whose conductor divides r."""
    out = {}
    for f in range(3, r + 1):
        if r % f:
            continue
        U = unit_group(f)
        orders = U.orders
        logs = {a: discrete_log(U, a) for a in range(f) if math.gcd(a, f) == 1}
        for ks in _product(orders):
            if not any(ks):
                continue
            phases = tuple(
                (sum((Fraction(k * e, o) for k, e, o in zip(ks, logs[a], orders)), Fraction(0)) % 1)
                if a in logs else None for a in range(f))
            if _is_primitive(f, phases):
                out[(f, phases)] = PrimitiveCharacter(f, phases)
    return list(out.values())


def _product(orders):
    if not orders:
        yield ()
        return
    for k in range(orders[0]):
        for rest in _product(orders[1:]):
            yield (k,) + rest


def _is_primitive(f: int, phases: tuple) -> bool:
    for d in range(1, f):
        if f % d:
            continue
        # induced from modulus d iff trivial on units congruent to 1 mod d
        if all(phases[a] == 0 for a in range(f) if phases[a] is not None and a % d == 1 % d):
            return False
    return True


def l_value_at_one(chi: PrimitiveCharacter, dps: int = 40) -> mpmath.mpc:
    """L(1, chi) = -(1/f) sum_a chi(a) psi(a/f) for nontrivial primitive chi."""
    with mpmath.workdps(dps):
        f = chi.conductor
        total = mpmath.mpc(0)
        for a in range(1, f + 1):
            t = chi.phases[a % f]
            if t is None:
                continue
            total += mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator) * mpmath.digamma(mpmath.mpf(a) / f)
        return -total / f


def _acceleration_data(C: CountingFunction) -> list:
    """(character, n_chi) with n_chi = number of divisions d in frakM whose order
    is a multiple of the conductor."""
    G = C.group
    m = C.m
    divs = [d for d, w in C.tame.items() if w == m]
    rs = sorted({d.order for d in divs})
    seen: dict = {}
    for r in rs:
        for chi in primitive_characters(r):
            seen[(chi.conductor, chi.phases)] = chi
    out = []
    for chi in seen.values():
        n = sum(1 for d in divs if d.order % chi.conductor == 0)
        out.append((chi, n))
    out.sort(key=lambda t: (t[0].conductor, [(-1 if x is None else x) for x in t[0].phases]))
    return out


def _twist_polynomials(acc: list, modulus: int) -> dict:
    """a mod modulus -> integer coefficients of prod_chi (1 - chi(a) t)^{n_chi}."""
    out = {}
    for a in range(modulus):
        if math.gcd(a, modulus) != 1:
            continue
        poly = np.array([1.0 + 0j])
        for chi, n in acc:
            z = chi.value(a)
            for _ in range(n):
                poly = np.convolve(poly, np.array([1.0 + 0j, -z]))
        ints = np.rint(poly.real).astype(np.int64)
        if np.abs(poly - ints).max() > 1e-8:
            raise ArithmeticError("twist polynomial is not integral")
        out[a] = tuple(int(c) for c in ints)
    return out


# --- leading constant ------------------------------------------------------------


@dataclass
class ConstantReport:
    group: FiniteAbelianGroup
    counting: str
    m: int
    w: Fraction
    Sp: int
    E_order: int
    unit_index: int
    infinite_factor: int
    S0: frozenset
    s0_factor: object
    prefactor: object
    local_factors: dict
    l_values: list
    truncation: int
    mode: str
    tail: tuple
    tail_certified: bool
    lo: mpmath.mpf
    hi: mpmath.mpf

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def width(self) -> float:
        return float(self.hi - self.lo)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {
            "group": list(self.group.factors), "counting": self.counting, "m": self.m,
            "w": str(self.w), "Sp": self.Sp, "E_order": self.E_order, "unit_index": self.unit_index,
            "infinite_factor": self.infinite_factor, "S0": sorted(self.S0),
            "s0_factor": [float(_lo(self.s0_factor)), float(_hi(self.s0_factor))],
            "prefactor": [float(_lo(self.prefactor)), float(_hi(self.prefactor))],
            "local_factors": {str(p): v for p, v in self.local_factors.items()},
            "l_values": self.l_values, "truncation": self.truncation, "mode": self.mode,
            "tail": [float(t) for t in self.tail], "tail_certified": self.tail_certified,
            "interval": [mpmath.nstr(self.lo, 12), mpmath.nstr(self.hi, 12)],
        }


def _neg_power(p: int, e: Fraction):
    """p^(-e) as an interval."""
    if e.denominator == 1:
        return _iv(1) / _iv(p) ** int(e)
    return iv.exp(-_iv(e.numerator) / e.denominator * iv.log(_iv(p)))


def local_character_sum(C: CountingFunction, p: int):
    """sum over chi_p : Z_p^x -> G of p^{-c(chi_p)/m}."""
    G, m = C.group, C.m
    counts: dict = {}
    if G.order % p:
        d = math.gcd(p - 1, G.exponent)
        for g, r in zip(G.elements, G.orders):
            if d % r == 0:
                c = C.tame_weight(g)
                counts[c] = counts.get(c, 0) + 1
    else:
        for c in all_local_characters(G, p):
            w = C.local_weight(c)
            counts[w] = counts.get(w, 0) + 1
    total = _iv(0)
    for c, k in sorted(counts.items()):
        total += k * _neg_power(p, Fraction(c, m))
    return total


def s0_factor(C: CountingFunction, w: Fraction):
    """Sum over viable specs at S0 of Nv^{-c/m} (1 - 1/Nv)^w."""
    G = C.group
    if not s0(G):
        return _iv(1)
    total = _iv(0)
    for s in all_local_specs(G, 2):
        if viable_partial(G, {2: s}, C):
            total += _neg_power(2, Fraction(C.spec_weight(s), C.m))
    return total * _iv_pow(1 - _iv(1) / 2, w)


def _iv_pow(x, w: Fraction):
    if w.denominator == 1:
        return x ** int(w)
    return iv.exp(_iv(w.numerator) / w.denominator * iv.log(x))


def _tail_budget(C: CountingFunction, N: int) -> float:
    """Bound on sum_{p > N} |log R_p| for the accelerated remainder factors."""
    n = C.group.order
    delta = 1.0 / C.m
    return (n - 1) * N ** (-delta) / delta + (4 * n * n + n) / N


def leading_constant(C: CountingFunction, N: int = 10 ** 6, mode: str = "accelerated",
                     keep_local: int = 12) -> ConstantReport:
    """lim N_C(X) / (X^{1/m} (log X)^{w-1}) as a certified interval."""
    G = C.group
    rep = fairness(C)
    if not rep.fair:
        raise ValueError(f"{C.name} is not fair on {G} (witness r={rep.witness}); "
                         "the leading-constant formula does not apply")
    if mode not in ("accelerated", "direct"):
        raise ValueError("mode must be 'accelerated' or 'direct'")
    N = int(N)
    if N < 4 * G.order:
        raise ValueError(f"truncation must be at least 4|G| = {4 * G.order}")
    m, w = C.m, pole_order(C)
    S0 = s0(G)
    Sp = sp(G)
    E_order = e_group(G, C).order()
    if E_order != Sp:
        raise ArithmeticError("obstruction group order disagrees with Sp")
    unit_index = 2 ** sum(1 for n in G.factors if n % 2 == 0)
    inf_factor = G.two_torsion_size()
    wf = _iv(w.numerator) / w.denominator
    gamma_w = iv.gamma(wf) if w.denominator != 1 else _iv(math.factorial(int(w) - 1))
    pref = _iv(Sp) / (_iv_pow(_iv(m), w - 1) * gamma_w * _iv(G.order) ** len(S0) * unit_index)
    sfac = s0_factor(C, w)

    acc = _acceleration_data(C) if mode == "accelerated" else []
    modulus = G.exponent
    polys = _twist_polynomials(acc, modulus) if acc else {}
    one_minus = lambda p: _iv_pow(1 - _iv(1) / p, w)  # noqa: E731

    prod = _iv(1)
    local = {}
    for p in primes_below(N + 1).tolist():
        if p in S0:
            E = _iv(1)
        else:
            E = local_character_sum(C, p) * one_minus(p)
            if len(local) < keep_local:
                local[p] = float(E.mid)
        if polys and p % modulus and math.gcd(p, modulus) == 1:
            coeffs = polys[p % modulus]
            t = _iv(1) / p
            val = _iv(0)
            for c in reversed(coeffs):
                val = val * t + c
            E = E * val
        prod *= E

    lvals = []
    if acc:
        with mpmath.workdps(40):
            total = mpmath.mpc(1)
            for chi, n in acc:
                L = l_value_at_one(chi)
                lvals.append({"conductor": chi.conductor, "n": n, "re": float(L.real), "im": float(L.imag)})
                total *= L ** n
            if abs(total.imag) > mpmath.mpf(10) ** -25:
                raise ArithmeticError("product of L-values is not real")
            lv = total.real
            eps = abs(lv) * mpmath.mpf(10) ** -30
            prod *= iv.mpf([lv - eps, lv + eps])

    certified = mode == "accelerated" or not _acceleration_data(C)
    T = _tail_budget(C, N)
    tail = (math.exp(-T), math.exp(T)) if certified else (1.0, 1.0)
    tail_iv = iv.exp(iv.mpf([-T, T])) if certified else _iv(1)
    total = pref * prod * sfac * inf_factor * tail_iv
    return ConstantReport(G, C.name, m, w, Sp, E_order, unit_index, inf_factor, S0, sfac, pref,
                          local, lvals, N, mode, tail, certified, _lo(total), _hi(total))


# --- discriminant probabilities for Z/p^2 -----------------------------------------


def is_pth_power_in_Ql(q: int, l: int, p: int) -> bool:
    """Is q a p-th power in Q_l (l prime, l not in {p, q})."""
    if l in (p, q):
        raise ValueError("l must differ from p and q")
    if (l - 1) % p:
        return True
    return pow(q, (l - 1) // p, l) == 1


@dataclass(frozen=True)
class TailEnclosure:
    p: int
    N: int
    sum_bound: float  # >= sum over n > N, n = 1 mod p^2, of n^{-(p+1)/p}
    max_term: float  # N^{-(p+1)/p}
    one_sided_upper: float  # (1 + p N^{-1/p})^{p^2 - p}
    lo: float  # factor bounds for the remaining ratio product
    hi: float

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "sum_bound": self.sum_bound, "one_sided_upper": self.one_sided_upper,
                "lo": self.lo, "hi": self.hi}

    def factor(self, down: float, up: float) -> tuple:
        """Enclosure of prod_{l > N} f_l for factors with
        exp(-down v/(1-k x)) <= f_l <= exp(up v), v = l^{-(p+1)/p}."""
        k = self.p * self.p - self.p
        lo = math.exp(-down * self.sum_bound / (1 - k * self.max_term)) if down else 1.0
        hi = math.exp(up * self.sum_bound) if up else 1.0
        return _down(lo), _up(hi)


def _down(x: float) -> float:
    return math.nextafter(math.nextafter(x, -math.inf), -math.inf)


def _up(x: float) -> float:
    return math.nextafter(math.nextafter(x, math.inf), math.inf)


def tail_enclosure(p: int, N: int) -> TailEnclosure:
    if N < 2:
        raise ValueError("N must be >= 2")
    a = (p + 1) / p
    k = p * p - p
    x = N ** (-a)
    # only l = 1 mod p^2 occur: the first term plus an integral with spacing p^2
    S = x + N ** (-1.0 / p) / p
    crude = (1 + p * N ** (-1.0 / p)) ** k
    t = TailEnclosure(p, N, _up(S), _up(x), crude, 0.0, 0.0)
    lo, hi = t.factor(k, k)
    return TailEnclosure(p, N, t.sum_bound, t.max_term, crude, lo, hi)


@dataclass(frozen=True)
class EulerProductValue:
    lo: float
    hi: float
    truncation: int
    label: str
    ordering: str = "increasing primes"
    tail: tuple = (1.0, 1.0)
    partial: Optional[float] = None

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError("empty interval")

    @property
    def mid(self) -> float:
        return (self.lo + self.hi) / 2

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"label": self.label, "lo": self.lo, "hi": self.hi, "truncation": self.truncation,
                "ordering": self.ordering, "tail": list(self.tail), "partial": self.partial}


_ULP_BUDGET = 64 * 2.0 ** -52


def _log_sum_enclosure(terms: np.ndarray) -> tuple:
    """Interval for the exact sum of logs approximated by ``terms``."""
    if len(terms) == 0:
        return 0.0, 0.0
    s = math.fsum(terms.tolist())
    err = _ULP_BUDGET * float(np.abs(terms).sum()) + 2.0 ** -52 * abs(s) + 1e-300
    return s - err, s + err


@dataclass(frozen=True)
class _DiscProducts:
    p: int
    q: int
    N: int
    log_s: tuple  # enclosure of log prod over non-p-th-power l of A/B
    log_r: tuple  # enclosure of log prod over l of (1+u)/B
    count: int  # qualifying primes l <= N


@lru_cache(maxsize=64)
def _disc_products(p: int, q: int, N: int) -> _DiscProducts:
    k = p * p - p
    a = (p + 1) / p
    ls_s, ls_r = [], []
    count = 0
    for block in iter_prime_blocks(2, N + 1):
        block = block[(block % (p * p) == 1) & (block != q)]
        if not len(block):
            continue
        count += len(block)
        lf = block.astype(np.float64)
        u = (p - 1) / lf
        v = np.power(lf, -a)
        B = 1 + u + k * v
        ls_r.append(np.log1p(-k * v / B))
        e = (block - 1) // p
        nonpth = np.array([pow(q, int(x), int(l)) != 1 for x, l in zip(e, block)], dtype=bool)
        ls_s.append(np.log1p(-(p * p) * v[nonpth] / B[nonpth]))
    cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0)  # noqa: E731
    return _DiscProducts(p, q, N, _log_sum_enclosure(cat(ls_s)), _log_sum_enclosure(cat(ls_r)), count)


WILD_MODES = ("exact", "omit", "tame-formula")


def wild_factors(p: int, q: int, mode: str = "exact") -> tuple:
    """(W_s, W_r): the factor at l = p in the twisted/untwisted and the
    image-in-pZ/p^2 products, as (lo, hi) float pairs."""
    if mode not in WILD_MODES:
        raise ValueError(f"wild mode must be one of {WILD_MODES}")
    if q == p or mode == "omit":
        return (1.0, 1.0), (1.0, 1.0)
    if mode == "tame-formula":
        u = _iv(p - 1) / p
        v = _neg_power(p, Fraction(p + 1, p))
        B = 1 + u + (p * p - p) * v
        pth = pow(q, p - 1, p * p) == 1
        Ws = _iv(1) if pth else (1 + u - p * v) / B
        Wr = (1 + u) / B
        return (float(Ws.a), float(Ws.b)), (float(Wr.a), float(Wr.b))
    G = FiniteAbelianGroup((p * p,))
    C = discriminant_counting(G)
    num_s, num_r, den = _iv(0), _iv(0), _iv(0)
    for c in all_local_characters(G, p):
        wt = _neg_power(p, Fraction(C.local_weight(c), C.m))
        den += wt
        # twist by zeta_{p^2}^{p * chi(q)}; summed over a unit-stable set this is
        # 1 on j = 0 and -1/(p-1) on each nonzero class mod p
        j = c.value_at(q)[0] % p
        num_s += wt if j == 0 else -wt / (p - 1)
        if all(x[0] % p == 0 for x in c.images):
            num_r += wt
    Ws, Wr = num_s / den, num_r / den
    return (float(Ws.a), float(Ws.b)), (float(Wr.a), float(Wr.b))


def _check_pq(p: int, q: int) -> None:
    from .primes import is_prime

    if p < 3 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if not is_prime(q):
        raise ValueError("q must be prime")


def _s_interval(p, q, N, wild):
    d = _disc_products(p, q, int(N))
    t = tail_enclosure(p, int(N))
    tl, th = t.factor(p * p, 0)
    (wl, wh), _ = wild_factors(p, q, wild)
    lo = math.exp(d.log_s[0]) * tl * wl
    hi = math.exp(d.log_s[1]) * th * wh
    return _down(lo), _up(hi), (tl, th), math.exp(sum(d.log_s) / 2) * (wl + wh) / 2


def _r_interval(p, q, N, wild):
    d = _disc_products(p, q, int(N))
    t = tail_enclosure(p, int(N))
    tl, th = t.factor(p * p - p, 0)
    _, (wl, wh) = wild_factors(p, q, wild)
    lo = math.exp(d.log_r[0]) * tl * wl
    hi = math.exp(d.log_r[1]) * th * wh
    return _down(lo), _up(hi), (tl, th), math.exp(sum(d.log_r) / 2) * (wl + wh) / 2


def disc_prob_s(p: int, q: int, N: int, wild: str = "exact") -> EulerProductValue:
    """Probability that a Z/p^2 character (not necessarily surjective) unramified
    at q is trivial at q, discriminant ordering."""
    _check_pq(p, q)
    lo, hi, tail, part = _s_interval(p, q, N, wild)
    f = lambda x: (1 + (p - 1) * x) / (p * p)  # noqa: E731
    return EulerProductValue(_down(f(lo)), _up(f(hi)), int(N), "s", tail=tail, partial=f(part))


def disc_prob_r(p: int, q: int, N: int, wild: str = "exact") -> EulerProductValue:
    """Probability that such a character has image in pZ/p^2."""
    _check_pq(p, q)
    lo, hi, tail, part = _r_interval(p, q, N, wild)
    return EulerProductValue(lo, hi, int(N), "r", tail=tail, partial=part)


@dataclass(frozen=True)
class S1Result:
    p: int
    q: int
    s: EulerProductValue
    r: EulerProductValue
    s1: EulerProductValue
    scaled: tuple  # p^2 * s1 enclosure
    ratio: tuple  # (p^2 s - 1) / ((p - 1) r) enclosure
    verdict: str  # below | above | inconclusive
    wild: str

    @property
    def conclusive(self) -> bool:
        return self.verdict != "inconclusive"

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "N": self.s1.truncation, "wild": self.wild,
                "s": self.s.to_json(), "r": self.r.to_json(), "s1": self.s1.to_json(),
                "p2_s1": list(self.scaled), "ratio": list(self.ratio), "verdict": self.verdict,
                "threshold": f"1/{self.p * self.p}"}


def s1_from(s: float, r: float, p: int) -> float:
    return (s - r / p) / (1 - r)


def disc_prob_s1(p: int, q: int, N: int, wild: str = "exact") -> S1Result:
    """Split-completely probability s1 for surjective Z/p^2 characters, and the
    certified comparison of p^2 s1 against 1."""
    s = disc_prob_s(p, q, N, wild)
    r = disc_prob_r(p, q, N, wild)
    if r.hi >= 1:
        raise ArithmeticError("r enclosure reaches 1")
    si, ri = iv.mpf([s.lo, s.hi]), iv.mpf([r.lo, r.hi])
    corners = [(_iv(a) - _iv(b) / p) / (1 - _iv(b)) for a in (s.lo, s.hi) for b in (r.lo, r.hi)]
    lo = min(float(c.a) for c in corners)
    hi = max(float(c.b) for c in corners)
    s1 = EulerProductValue(_down(lo), _up(hi), int(N), "s1",
                           partial=s1_from(s.partial, r.partial, p))
    scaled = (_down(p * p * lo), _up(p * p * hi))
    rat = (p * p * si - 1) / ((p - 1) * ri)
    ratio = (float(rat.a), float(rat.b))
    if scaled[1] < 1:
        verdict = "below"
    elif scaled[0] > 1:
        verdict = "above"
    else:
        verdict = "inconclusive"
    return S1Result(p, q, s, r, s1, scaled, ratio, verdict, wild)


def empirical_disc_prob(p: int, q: int, X: int, counting: str = "discriminant",
                        schedule=None) -> ProbabilityEstimate:
    """Pr(q splits completely | q unramified) over surjective Z/p^2 characters with C < X."""
    from .counting import conductor_counting

    G = FiniteAbelianGroup((p * p,))
    C = discriminant_counting(G) if counting == "discriminant" else conductor_counting(G)
    return conditional_probability(C, X, split_completely(q), unramified_at(q), schedule)
