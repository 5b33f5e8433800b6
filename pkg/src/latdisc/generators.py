"""Explicit generators for O(L/p^nL) via the subnormal series, and their
induced action on the discriminant group."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .padic_core import PadicContext, ModMatrix
from . import jordan as jd
from . import orders as od
from . import elementary_forms as ef
from . import f2_solver as fs
from . import hensel as hn
from .hensel import _mul, _sub, _tr, _inv, _div, _offsets, _block


class GeneratorError(Exception):
    pass


class InsufficientLevel(GeneratorError):
    pass


def _blocks_of(J: jd.JordanDecomposition):
    return list(zip(J.scales, J.ranks))


def _gram_int(J: jd.JordanDecomposition):
    return J.assembled().tolists()


def _unit_block(J, bi):
    """The unit part of the bi-th modular block, as integer lists."""
    b = J.blocks[bi]
    return b.gram.tolists()


def complete_lower(F, G, blocks, p, N):
    """Replace the lower block triangle of F so that (FGF^T)_{(i,j)} = 0
    exactly for i < j, keeping the diagonal and upper blocks.

    F, G are integer matrices; the result is reduced mod p^N.
    """
    n = len(F)
    offs = _offsets(blocks)
    Ff = [[Fraction(x) for x in row] for row in F]
    Gf = [[Fraction(x) for x in row] for row in G]
    m = p ** N
    for bj in range(1, len(blocks)):
        Rj = offs[bj][0]
        rj = blocks[bj][1]
        FG = [
            [sum(Ff[a][t] * Gf[t][c] for t in range(n)) for c in range(n)]
            for a in range(Rj)
        ]
        for u in range(rj):
            ju = offs[bj][0] + u
            rhs = [
                -sum(FG[a][c] * Ff[ju][c] for c in range(Rj, n)) for a in range(Rj)
            ]
            aug = [[FG[a][c] for c in range(Rj)] + [rhs[a]] for a in range(Rj)]
            for col in range(Rj):
                piv = next(i for i in range(col, Rj) if aug[i][col] != 0)
                aug[col], aug[piv] = aug[piv], aug[col]
                d = aug[col][col]
                aug[col] = [v / d for v in aug[col]]
                for i in range(Rj):
                    if i != col and aug[i][col] != 0:
                        f = aug[i][col]
                        aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
            for c in range(Rj):
                sol = aug[c][Rj]
                if sol.denominator % p == 0:
                    raise GeneratorError("completion is not p-integral")
                Ff[ju][c] = sol
    out = []
    for row in Ff:
        out.append([x.numerator * pow(x.denominator, -1, m) % m for x in row])
    return out


def _assert_level(F: ModMatrix, G: ModMatrix, blocks, want, what):
    lvl = hn.approximation_level(F, G, G, blocks)
    cap = F.ctx.N - max(i for i, _ in blocks) - 3
    if lvl < min(want, cap):
        raise InsufficientLevel("%s reached level %d < %d" % (what, lvl, want))
    return lvl


# ---------------------------------------------------------------------------
# rho-level generators


def _embed_block(J, bi, mat):
    """Identity matrix with the bi-th diagonal block replaced by mat."""
    r = J.rank
    offs = _offsets(_blocks_of(J))
    F = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    a0, _ = offs[bi]
    for i, row in enumerate(mat):
        for j, x in enumerate(row):
            F[a0 + i][a0 + j] = x
    return F


def _odd_unit_vector(U, m):
    """v with v U v^T odd, for an odd symmetric unit-scale block U (mod m)."""
    rk = len(U)
    for k in range(rk):
        if U[k][k] % 2:
            v = [0] * rk
            v[k] = 1
            return v
    for k in range(rk):
        for l in range(k + 1, rk):
            val = (U[k][k] + U[l][l] + 2 * U[k][l]) % 2
            if val:
                v = [0] * rk
                v[k] = v[l] = 1
                return v
    raise GeneratorError("no odd vector in an odd block")


def _bound_correction(J, bi, F, N):
    """Install the neighbor correction blocks making a bound-scale block
    generator 1-approximate (p = 2)."""
    p = 2
    m = p ** N
    blocks = _blocks_of(J)
    offs = _offsets(blocks)
    i = blocks[bi][0]
    ri = blocks[bi][1]
    G = _gram_int(J)
    A = _sub(_mul(_mul(F, G, m), _tr(F), m), G, m)
    Aii = _block(A, offs, bi, bi)
    h = [_div([[Aii[k][k]]], 2 ** (i + 1))[0][0] for k in range(ri)]
    Ui = _unit_block(J, bi)
    Fii = _block(F, offs, bi, bi)
    UFinv = _inv(_mul(Ui, _tr(Fii), m), 2, N)

    def place(br, bc, mat):
        (a0, _), (b0, _) = offs[br], offs[bc]
        for x, row in enumerate(mat):
            for y, v in enumerate(row):
                F[a0 + x][b0 + y] = v % m

    if J.parity_at(i - 1):
        bm = next(k for k, (s, _) in enumerate(blocks) if s == i - 1)
        Um = _unit_block(J, bm)
        v = _odd_unit_vector(Um, m)
        # F_{(i,i-1)} = 2 h^T v, partner from the exact-zero condition
        low = [[2 * hk * vk % m for vk in v] for hk in h]
        up = _mul(_mul([[-(x) for x in row] for row in Um], _tr([[vk for vk in v]]), m),
                  _mul([[hk for hk in h]], UFinv, m), m)
        place(bi, bm, low)
        place(bm, bi, up)
    else:
        bp_ = next(k for k, (s, _) in enumerate(blocks) if s == i + 1)
        Up = _unit_block(J, bp_)
        v = _odd_unit_vector(Up, m)
        # F_{(i,i+1)} = h^T v, partner rescaled by 2
        up = [[hk * vk % m for vk in v] for hk in h]
        low = _mul(_mul([[-2 * x for x in row] for row in Up], _tr([v]), m),
                   _mul([h], UFinv, m), m)
        place(bi, bp_, up)
        place(bp_, bi, low)
    return F


def rho_level_generators(J: jd.JordanDecomposition):
    """1-approximate lifts of generators of each O(rho_i(L))."""
    p = J.ctx.p
    N = J.ctx.N
    ctx = J.ctx
    G = ModMatrix(ctx, _gram_int(J))
    blocks = _blocks_of(J)
    out = []
    for bi, (i, _) in enumerate(blocks):
        form = jd.rho(J, i)
        for g in ef.generators_O(form):
            F = _embed_block(J, bi, [[x % ctx.modulus for x in row] for row in g.matrix])
            if p == 2 and not jd.is_free(J, i):
                F = _bound_correction(J, bi, F, N)
            Fm = ModMatrix(ctx, F)
            _assert_level(Fm, G, blocks, 1, "rho-level generator at scale %d" % i)
            out.append(Fm)
    return out


# ---------------------------------------------------------------------------
# K0/K1 generators


def _upper_positions(J):
    blocks = _blocks_of(J)
    offs = _offsets(blocks)
    pos = []
    for bi in range(len(blocks)):
        for bj in range(bi + 1, len(blocks)):
            for u in range(blocks[bi][1]):
                for v in range(blocks[bj][1]):
                    pos.append((offs[bi][0] + u, offs[bj][0] + v))
    return pos


K0_ENUM_BOUND = 2 ** 20


def k0_k1_generators(J: jd.JordanDecomposition):
    """Generators of K_0/K_1: identity diagonal blocks, free upper entries."""
    p = J.ctx.p
    ctx = J.ctx
    blocks = _blocks_of(J)
    if len(blocks) < 2:
        return []
    G = ModMatrix(ctx, _gram_int(J))
    Gl = G.tolists()
    r = J.rank
    pos = _upper_positions(J)
    out = []
    if p != 2:
        for (a, b) in pos:
            F = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
            F[a][b] = 1
            F = complete_lower(F, Gl, blocks, p, ctx.N)
            Fm = ModMatrix(ctx, F)
            _assert_level(Fm, G, blocks, 1, "K0 generator")
            out.append(Fm)
        return out
    if 4 ** len(pos) > K0_ENUM_BOUND:
        raise GeneratorError("K0 search space too large")
    # a class of upper bits belongs to K0/K1 exactly when some representative
    # (upper entries lifted mod 4, lower blocks completed) is 1-approximate
    members = []
    witnesses = {}
    for bits in itertools.product(range(2), repeat=len(pos)):
        if not any(bits):
            continue
        for adj in itertools.product(range(2), repeat=len(pos)):
            F = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
            for bit, extra, (a, b) in zip(bits, adj, pos):
                F[a][b] = bit + 2 * extra
            try:
                Fc = complete_lower(F, Gl, blocks, 2, ctx.N)
            except GeneratorError:
                continue
            if hn.approximation_level(ModMatrix(ctx, Fc), G, G, blocks) >= 1:
                members.append(bits)
                witnesses[bits] = Fc
                break
    # greedy generating subset under mod-2 multiplication
    def key(M):
        return tuple(x % 2 for row in M for x in row)

    def mat_of(bits):
        F = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
        for bit, (a, b) in zip(bits, pos):
            F[a][b] = bit
        return F

    chosen = []
    closure = {key([[1 if i == j else 0 for j in range(r)] for i in range(r)])}
    target = len(members) + 1
    for bits in members:
        M = mat_of(bits)
        if key(M) in closure:
            continue
        chosen.append(bits)
        frontier = [mat_of(b) for b in chosen]
        closure = {key([[1 if i == j else 0 for j in range(r)] for i in range(r)])}
        queue = [[[1 if i == j else 0 for j in range(r)] for i in range(r)]]
        while queue:
            cur = queue.pop()
            for gmat in frontier:
                nxt = _mul(cur, gmat, 2)
                k = key(nxt)
                if k not in closure:
                    closure.add(k)
                    queue.append(nxt)
        if len(closure) >= target:
            break
    for bits in chosen:
        Fm = ModMatrix(ctx, witnesses[bits])
        _assert_level(Fm, G, blocks, 1, "K0 generator")
        out.append(Fm)
    return out


# ---------------------------------------------------------------------------
# K_a/K_2a layer generators


def ka_layer_generators(J: jd.JordanDecomposition, a: int):
    """Basis of the free module K_a/K_{2a}, as 2a-approximate matrices I + p^a X."""
    if a < 1:
        raise ValueError("a must be >= 1")
    p = J.ctx.p
    ctx = J.ctx
    blocks = _blocks_of(J)
    offs = _offsets(blocks)
    G = ModMatrix(ctx, _gram_int(J))
    Gl = G.tolists()
    r = J.rank
    m = ctx.modulus
    out = []

    def finish(F, tag):
        Fm = ModMatrix(ctx, F)
        _assert_level(Fm, G, blocks, 2 * a, tag)
        out.append(Fm)

    # diagonal-block degrees of freedom
    for bi, (i, rk) in enumerate(blocks):
        U = _unit_block(J, bi)
        Uinv = _inv(U, p, ctx.N)
        basis = []
        if p != 2 or a >= 2:
            for k in range(rk):
                for l in range(k + 1, rk):
                    H = [[0] * rk for _ in range(rk)]
                    H[k][l] = 1
                    H[l][k] = -1
                    basis.append(H)
        else:
            z = [Uinv[k][k] % 2 for k in range(rk)]
            _, kernel = fs.solve(fs.SymSystem([[0] * rk for _ in range(rk)], z, [0] * rk))
            basis = kernel
        for H in basis:
            X = _mul(H, Uinv, m)
            F = [[(1 if i2 == j2 else 0) for j2 in range(r)] for i2 in range(r)]
            a0, _ = offs[bi]
            for x in range(rk):
                for y in range(rk):
                    F[a0 + x][a0 + y] = (F[a0 + x][a0 + y] + p ** a * X[x][y]) % m
            finish(F, "K%d layer diagonal generator" % a)

    # free upper entries
    for (x, y) in _upper_positions(J):
        F = [[1 if i2 == j2 else 0 for j2 in range(r)] for i2 in range(r)]
        F[x][y] = p ** a
        F = complete_lower(F, Gl, blocks, p, ctx.N)
        finish(F, "K%d layer upper generator" % a)
    return out


# ---------------------------------------------------------------------------
# assembly


class GeneratorSet:
    __slots__ = ("ctx", "n", "matrices", "provenance", "asserted_order", "lifts")

    def __init__(self, ctx, n, matrices, provenance, asserted_order, lifts):
        self.ctx = ctx
        self.n = n
        self.matrices = matrices
        self.provenance = provenance
        self.asserted_order = asserted_order
        self.lifts = lifts

    def json(self):
        return {
            "p": self.ctx.p,
            "n": self.n,
            "order": str(self.asserted_order),
            "generators": [
                {"matrix": M.tolists(), "provenance": tag}
                for M, tag in zip(self.matrices, self.provenance)
            ],
        }


def generators_mod_pn(J: jd.JordanDecomposition, n: int) -> GeneratorSet:
    """Generators of O(L/p^nL): rho-level lifts, K0/K1, and K_a/K_2a layers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = J.ctx.p
    ctx = J.ctx
    blocks = _blocks_of(J)
    maxsc = blocks[-1][0]
    if ctx.N < n + maxsc + 3:
        raise jd.InsufficientPrecision("need N >= n + max scale + 3")
    G = ModMatrix(ctx, _gram_int(J))
    tagged = []
    for F in rho_level_generators(J):
        tagged.append((F, 1, "rho-lift"))
    for F in k0_k1_generators(J):
        tagged.append((F, 1, "K0"))
    a = 1
    while a < n:
        for F in ka_layer_generators(J, a):
            tagged.append((F, min(2 * a, n), "Ka-layer %d" % a))
        a *= 2

    small = PadicContext(p, n)
    mats, tags, lifts = [], [], []
    for F, lvl, tag in tagged:
        if lvl < n:
            F = hn.hensel_qf(F, G, G, lvl, n, blocks)
        lifts.append(F)
        mats.append(ModMatrix(small, [[x % p ** n for x in row] for row in F.tolists()]))
        tags.append(tag)
    order = od.order_mod_pn(J, n).total
    return GeneratorSet(ctx, n, mats, tags, order, lifts)


# ---------------------------------------------------------------------------
# discriminant group


class DiscAction:
    """Action on the discriminant group, column block j reduced mod p^j."""

    __slots__ = ("p", "divisors", "entries")

    def __init__(self, p, divisors, entries):
        self.p = p
        self.divisors = divisors  # list of (scale, rank), scales >= 1
        self.entries = entries

    def _col_moduli(self):
        out = []
        for s, rk in self.divisors:
            out += [self.p ** s] * rk
        return out

    def canonical(self):
        mods = self._col_moduli()
        return tuple(
            tuple(x % mods[j] for j, x in enumerate(row)) for row in self.entries
        )

    def is_identity(self):
        mods = self._col_moduli()
        n = len(self.entries)
        for i in range(n):
            for j in range(n):
                want = 1 if i == j else 0
                if (self.entries[i][j] - want) % mods[j]:
                    return False
        return True

    def compose(self, other):
        n = len(self.entries)
        prod = [
            [sum(self.entries[i][k] * other.entries[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
        return DiscAction(self.p, self.divisors, prod)

    def __eq__(self, other):
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())


def discriminant_action(F: ModMatrix, J: jd.JordanDecomposition) -> DiscAction:
    """Block-transpose action induced on L^sharp by the isometry class of F."""
    p = J.ctx.p
    blocks = _blocks_of(J)
    maxsc = blocks[-1][0]
    if F.ctx.N < maxsc:
        raise InsufficientLevel("need F mod p^n with n >= max scale")
    offs = _offsets(blocks)
    Fl = F.tolists()
    divisors = [(s, rk) for s, rk in blocks if s >= 1]
    live = [bi for bi, (s, _) in enumerate(blocks) if s >= 1]
    size = sum(rk for _, rk in divisors)
    ent = [[0] * size for _ in range(size)]
    ro = 0
    for bi in live:
        co = 0
        for bj in live:
            blk = _tr(_block(Fl, offs, bj, bi))
            for x in range(len(blk)):
                for y in range(len(blk[0]) if blk else 0):
                    ent[ro + x][co + y] = blk[x][y]
            co += blocks[bj][1]
        ro += blocks[bi][1]
    return DiscAction(p, divisors, ent)


class DiscriminantGroup:
    __slots__ = ("divisors", "order_O", "actions", "gram_fractions", "even")

    def __init__(self, divisors, order_O, actions, gram_fractions, even):
        self.divisors = divisors  # dict prime -> list of (scale, rank)
        self.order_O = order_O
        self.actions = actions  # dict prime -> list of DiscAction
        self.gram_fractions = gram_fractions  # dict prime -> dual gram (Fractions)
        self.even = even

    def group_order(self):
        total = 1
        for p, divs in self.divisors.items():
            for s, rk in divs:
                total *= p ** (s * rk)
        return total

    def json(self):
        return {
            "divisors": {
                str(p): [[s, rk] for s, rk in divs] for p, divs in self.divisors.items()
            },
            "order": str(self.order_O),
            "generators": {
                str(p): [a.canonical() for a in acts] for p, acts in self.actions.items()
            },
        }


def _dual_gram_fractions(J: jd.JordanDecomposition):
    """Inverse of the assembled gram over Q, restricted to scales >= 1."""
    Gl = _gram_int(J)
    n = len(Gl)
    aug = [[Fraction(Gl[i][j]) for j in range(n)] + [Fraction(int(i == k)) for k in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        d = aug[col][col]
        aug[col] = [v / d for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
    inv = [row[n:] for row in aug]
    offs = _offsets(_blocks_of(J))
    live = [k for k, (s, _) in enumerate(_blocks_of(J)) if s >= 1]
    idx = []
    for bi in live:
        idx.extend(range(*offs[bi]))
    return [[inv[i][j] for j in idx] for i in idx]


def generators_discriminant(gram) -> DiscriminantGroup:
    """Per-prime discriminant generators for an integral Z-gram."""
    det = od._int_det(gram)
    if det == 0:
        raise od.Degenerate("gram is singular")
    even = all(gram[i][i] % 2 == 0 for i in range(len(gram)))
    divisors, actions, grams = {}, {}, {}
    total = 1
    for p in sorted(od._factorize(det)):
        J = od.decompose_over_Zp(gram, p, extra=max(1, 0))
        n = max(J.max_scale(), 1)
        if J.ctx.N < n + J.max_scale() + 3:
            J = od.decompose_over_Zp(gram, p, extra=n + 3)
        gens = generators_mod_pn(J, n)
        acts = []
        for M in gens.matrices:
            act = discriminant_action(M, J)
            if not act.is_identity():
                acts.append(act)
        divs = [(s, rk) for s, rk in _blocks_of(J) if s >= 1]
        if divs:
            divisors[p] = divs
            actions[p] = acts
            grams[p] = _dual_gram_fractions(J)
            total *= od.order_discriminant_p(J)
    return DiscriminantGroup(divisors, total, actions, grams, even)
