"""Closed-form order computations for O(L/p^nL), O(L^sharp), Watson counts and p-masses."""

from __future__ import annotations

from fractions import Fraction

from .padic_core import PadicContext, ModMatrix
from . import elementary_forms as ef
from . import jordan as jd


class OrdersError(Exception):
    pass


class Degenerate(OrdersError):
    pass


def s_correction(tm: int, t: int, tp: int) -> int:
    if (tm, t, tp) == (1, 0, 1):
        return 1
    if (tm, t, tp) == (0, 1, 1):
        return -1
    if (tm, t, tp) == (1, 1, 1):
        return 1
    return 0


class OrderBreakdown:
    __slots__ = ("p", "n", "v_exponent", "factors", "total")

    def __init__(self, p, n, v_exponent, factors, total):
        self.p = p
        self.n = n
        self.v_exponent = v_exponent
        self.factors = factors
        self.total = total

    def json(self):
        return {
            "p": self.p,
            "n": self.n,
            "v": self.v_exponent,
            "factors": self.factors,
            "order": str(self.total),
        }


def _pair_sum(scales, ranks, weight):
    out = 0
    for a in range(len(scales)):
        for b in range(a + 1, len(scales)):
            out += weight(scales[a]) * ranks[a] * ranks[b]
    return out


def order_mod_pn(J: jd.JordanDecomposition, n: int) -> OrderBreakdown:
    """#O(L/p^nL) by the closed formula."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = J.ctx.p
    r = J.rank
    scales, ranks = J.scales, J.ranks
    v = (n - 1) * r * (r - 1) // 2 + _pair_sum(scales, ranks, lambda i: 1)
    factors = []
    if p != 2:
        total = p ** v
        for b in J.blocks:
            o = ef.order_O(jd.rho(J, b.scale))
            factors.append({"scale": b.scale, "order": o})
            total *= o
        return OrderBreakdown(p, n, v, factors, total)
    delta = 1 if n >= 2 else 0
    exp2 = v
    odd_part = Fraction(1)
    for i in range(scales[0] - 1, scales[-1] + 2):
        tm, t, tp = J.parity_at(i - 1), J.parity_at(i), J.parity_at(i + 1)
        si = s_correction(tm, t, tp)
        entry = {"scale": i, "t": t, "s": si}
        contrib = t * delta - si
        if J.block_at(i) is not None:
            form = jd.rho(J, i)
            o = ef.order_O(form)
            entry["kind"] = form.kind
            entry["order"] = o
            odd_part *= o
            if form.kind == "bilinear":
                contrib -= J.rank_at(i)
        exp2 += contrib
        entry["exp2"] = contrib
        if si or t or J.block_at(i) is not None:
            factors.append(entry)
    total = odd_part * Fraction(2) ** exp2
    assert total.denominator == 1, "order formula produced a non-integer"
    return OrderBreakdown(2, n, v, factors, int(total))


def order_discriminant_p(J: jd.JordanDecomposition) -> int:
    """#O(L_p^sharp) by the closed formula."""
    p = J.ctx.p
    scales, ranks = J.scales, J.ranks
    if scales[0] < 0:
        raise ValueError("discriminant orders need an integral lattice")
    w = sum((i - 1) * ri * (ri - 1) // 2 for i, ri in zip(scales, ranks) if i > 0)
    w += _pair_sum(scales, ranks, lambda i: i)
    if p != 2:
        total = p ** w
        for b in J.blocks:
            if b.scale > 0:
                total *= ef.order_O(jd.rho(J, b.scale))
        return total
    t0 = J.parity_at(0)
    exp2 = w - J.parity_at(1)
    odd_part = Fraction(1)
    for i in range(1, scales[-1] + 2):
        tm, t, tp = J.parity_at(i - 1), J.parity_at(i), J.parity_at(i + 1)
        exp2 += t - s_correction(tm, t, tp)
        if J.block_at(i) is not None:
            form = jd.rho(J, i)
            o = ef.order_O(form)
            odd_part *= o
            if form.kind == "bilinear":
                exp2 += (t0 - 1) * J.rank_at(i)
            else:
                exp2 += t0 * J.rank_at(i)
    total = odd_part * Fraction(2) ** exp2
    assert total.denominator == 1, "discriminant order formula produced a non-integer"
    return int(total)


# ---------------------------------------------------------------------------
# Z-level assembly


def _int_det(gram) -> int:
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for i in range(col + 1, n):
            c = a[i][col] / a[col][col]
            if c:
                a[i] = [x - c * y for x, y in zip(a[i], a[col])]
    assert det.denominator == 1
    return int(det)


def _factorize(n: int):
    n = abs(n)
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def decompose_over_Zp(gram, p: int, extra: int = 0) -> jd.JordanDecomposition:
    """Jordan decomposition of an integer gram at p with auto-sized precision."""
    det = _int_det(gram)
    if det == 0:
        raise Degenerate("gram is singular")
    s = 0
    d = det
    while d % p == 0:
        d //= p
        s += 1
    ctx = PadicContext(p, s + jd.PRECISION_MARGIN + max(extra, 0))
    return jd.jordan_decompose(ModMatrix(ctx, gram))


def order_discriminant_Z(gram):
    """#O(L^sharp) for an integral Z-lattice, with the per-prime breakdown."""
    det = _int_det(gram)
    if det == 0:
        raise Degenerate("gram is singular")
    primes = {}
    total = 1
    for p in sorted(_factorize(det)):
        J = decompose_over_Zp(gram, p)
        o = order_discriminant_p(J)
        primes[p] = o
        total *= o
    return total, primes


# ---------------------------------------------------------------------------
# embedding counts, Watson counts, p-masses


def embedding_lift_counts(J: jd.JordanDecomposition, i: int, n: int):
    """(a1, a2): mod-2 liftable embedding count for the scale-i constituent of
    the sublattice of scales >= i, and the extension count to mod 2^n."""
    if J.ctx.p != 2:
        raise ValueError("embedding counts are a p = 2 computation")
    blk = J.block_at(i)
    if blk is None:
        raise ValueError("no block at scale %d" % i)
    t0, t1, t2 = J.parity_at(i), J.parity_at(i + 1), J.parity_at(i + 2)
    r0 = blk.rank
    r1 = J.rank_at(i + 1)
    r = sum(rk for sc, rk in zip(J.scales, J.ranks) if sc >= i)
    if t1 == 0 and r1 > 0:
        q1 = ef.ElementaryForm(2, "quadratic", J.block_at(i + 1).gram.tolists())
        z1 = ef.count_zeros(q1)
    else:
        z1 = 1
    log_z1 = z1.bit_length() - 1
    assert 2 ** log_z1 == z1
    table = {
        (0, 0, 0): 0,
        (0, 0, 1): 0,
        (0, 1, 0): r0,
        (0, 1, 1): r0,
        (1, 0, 0): r1 - log_z1,
        (1, 0, 1): 1,
        (1, 1, 0): r0 + r1 - 1 - log_z1,
        (1, 1, 1): r0 + 1,
    }
    c0 = table[(t0, t1, t2)]
    gram0 = blk.gram.tolists()
    if t1 == 0:
        base = ef.order_O(ef.ElementaryForm(2, "quadratic", gram0))
    else:
        base = ef.order_O(ef.ElementaryForm(2, "bilinear", gram0))
    a1 = 2 ** (r0 * (r - r0) - c0) * base
    if n == 1:
        a2 = 1
    else:
        e, g = r0, r
        a2 = 2 ** ((n - 1) * e * g - (n - 1) * e * (e + 1) // 2 + t0)
    return a1, a2


def n_stable(J: jd.JordanDecomposition) -> int:
    return J.max_scale() + 2


def watson_count(J: jd.JordanDecomposition, n: int) -> int:
    """N(L, p^n): matrices X mod p^n with X G X^T = G mod p^n."""
    if n < n_stable(J):
        raise ValueError("Watson counts need n >= max scale + 2")
    p = J.ctx.p
    out = order_mod_pn(J, n).total
    out *= p ** _pair_sum(J.scales, J.ranks, lambda i: i)
    for i, ri in zip(J.scales, J.ranks):
        out *= p ** (i * ri * (ri + 1) // 2)
    return out


def p_mass(J: jd.JordanDecomposition, n: int) -> Fraction:
    if n < n_stable(J):
        raise ValueError("p-masses need n >= max scale + 2")
    p = J.ctx.p
    r = J.rank
    s = sum(i * ri for i, ri in zip(J.scales, J.ranks))
    return Fraction(p ** (n * r * (r - 1) // 2 + s * (r + 1) // 2), watson_count(J, n))
